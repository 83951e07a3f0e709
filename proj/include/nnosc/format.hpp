#ifndef NNOSC_FORMAT_HPP
#define NNOSC_FORMAT_HPP

#include <string>

namespace nnosc {

/// Significant digits used for every real written to CSV or JSON.
inline constexpr int kOutputDigits = 12;

/// "%.12g"; "nan" / "inf" / "-inf" for non-finite values.
std::string format_real(double v);

/// The double obtained by printing v with format_real and reading it back.
double round_to_output(double v);

}  // namespace nnosc

#endif  // NNOSC_FORMAT_HPP
