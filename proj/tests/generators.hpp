#pragma once

#include "obstacle/generators.hpp"

namespace testgen {
using namespace obstacle::gen;
}  // namespace testgen
