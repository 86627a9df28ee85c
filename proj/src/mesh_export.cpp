#include "graspkit/types.hpp"
