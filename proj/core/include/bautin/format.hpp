#pragma once

#include <string>

namespace bautin {

/// Shortest decimal representation that round-trips (locale independent).
std::string format_double(double value);

}  // namespace bautin
