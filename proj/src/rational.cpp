#include "fejerlab/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace fejerlab {

std::string to_fraction_string(const BigRational& q) {
    const BigInt num = numerator(q);
    const BigInt den = denominator(q);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

double log_big(const BigInt& x) {
    if (x <= 0) {
        throw std::domain_error("log_big wants a positive integer");
    }
    const unsigned bits = static_cast<unsigned>(boost::multiprecision::msb(x));
    if (bits < 1000) {
        return std::log(x.convert_to<double>());
    }
    const unsigned shift = bits - 52;
    const BigInt top = x >> shift;
    return std::log(top.convert_to<double>()) +
           static_cast<double>(shift) * 0.6931471805599453;
}

} // namespace fejerlab
