#pragma once

// M-QAM BER approximation BER = 0.2 exp(-1.6 C P / (2^b - 1)) and its inversions.

#include "cogload/errors.hpp"

#include <cmath>

namespace cogload {

/// -ln(5 BER_th) / 1.6: the power-per-(2^b - 1) a unit-CNIR subcarrier needs to hit BER_th.
inline double ber_power_factor(double ber_threshold)
{
    if (!(ber_threshold > 0.0 && ber_threshold < 0.2))
        throw DomainError("ber threshold out of range (0, 0.2)");
    return -std::log(5.0 * ber_threshold) / 1.6;
}

inline double bit_error_rate(double power, double bits, double cnir)
{
    return 0.2 * std::exp(-1.6 * cnir * power / (std::exp2(bits) - 1.0));
}

}  // namespace cogload
