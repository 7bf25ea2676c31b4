// SPDX-License-Identifier: Apache-2.0

#include "pqeig/types.hpp"

#include <cmath>

namespace pqeig {

Exponents::Exponents(double p, double q, double alpha, double beta)
    : p_(p), q_(q), alpha_(alpha), beta_(beta)
{
    if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q))
        throw std::invalid_argument("Exponents: p and q must be finite and > 1");
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("Exponents: alpha and beta must be > 0");
    if (std::abs(alpha / p + beta / q - 1.0) > 1e-12)
        throw std::invalid_argument("Exponents: alpha/p + beta/q must equal 1");
}

Exponents Exponents::with_beta_solved(double p, double q, double alpha)
{
    return Exponents(p, q, alpha, q * (1.0 - alpha / p));
}

Exponents Exponents::diagonal(double p)
{
    return Exponents(p, p, 0.5 * p, 0.5 * p);
}

std::string_view to_string(Normalization n)
{
    switch (n) {
    case Normalization::peak_one:
        return "peak-one";
    case Normalization::b_one:
        return "B-one";
    case Normalization::lp_one:
        return "Lp-one";
    }
    return "unknown";
}

} // namespace pqeig
