#pragma once

#include <string>

namespace geocount {

/// Shortest form for integers, otherwise 17 significant digits; locale
/// independent.
std::string format_double(double x);

}  // namespace geocount
