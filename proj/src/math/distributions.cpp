#include "math/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "common/errors.hpp"

namespace cddp {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
}  // namespace

Family family_from_name(const std::string& name) {
    if (name == "normal" || name == "Normal") return Family::Normal;
    if (name == "weibull" || name == "Weibull") return Family::Weibull;
    if (name == "gamma" || name == "Gamma") return Family::Gamma;
    if (name == "lognormal" || name == "Lognormal") return Family::Lognormal;
    throw ValidationError("unknown distribution family: " + name);
}

std::string family_name(Family f) {
    switch (f) {
        case Family::Normal: return "Normal";
        case Family::Weibull: return "Weibull";
        case Family::Gamma: return "Gamma";
        case Family::Lognormal: return "Lognormal";
    }
    return "?";
}

bool family_positive_support(Family f) { return f != Family::Normal; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

namespace {

// Acklam's rational approximation, polished with Halley steps against the
// exact cdf; relative error far below 1e-12 across (0,1).
double normal_quantile_approx(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,  -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p <= 1 - plow) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

}  // namespace

double normal_quantile(double u) {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("normal_quantile: u outside (0,1)");
    double z = normal_quantile_approx(u);
    for (int i = 0; i < 2; ++i) {
        const double e = normal_cdf(z) - u;
        const double pdf = std::exp(-0.5 * z * z - kLogSqrt2Pi);
        if (pdf <= 0.0) break;
        const double v = e / pdf;
        z -= v / (1 + z * v / 2);
    }
    return z;
}

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw ValidationError("regularized_gamma_p: a <= 0");
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // Series representation.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int it = 0; it < 500; ++it) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Continued fraction (modified Lentz).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

namespace {

double gamma_log_pdf(double shape, double scale, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) - shape * std::log(scale);
}

// Inverse of P(shape, x/scale) = u: Wilson-Hilferty (or small-shape series)
// start, then safeguarded Halley iterations on the unit-scale problem.
double gamma_quantile(double shape, double scale, double u) {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("gamma_quantile: u outside (0,1)");
    const double a = shape;
    double x;
    if (a > 1.0) {
        const double z = normal_quantile(u);
        const double t = 1.0 - 1.0 / (9.0 * a) + z / (3.0 * std::sqrt(a));
        x = a * t * t * t;
        if (x <= 0.0) x = 1e-8;
    } else {
        const double t = 1.0 - a * (0.253 + a * 0.12);
        if (u < t)
            x = std::pow(u / t, 1.0 / a);
        else
            x = 1.0 - std::log((1.0 - u) / (1.0 - t));
        if (x <= 0.0) x = 1e-10;
    }
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 100; ++it) {
        const double f = regularized_gamma_p(a, x) - u;
        if (f > 0)
            hi = std::min(hi, x);
        else
            lo = std::max(lo, x);
        const double pdf = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
        double next;
        if (pdf > 1e-300) {
            double step = f / pdf;
            const double corr = step * ((a - 1.0) / x - 1.0) / 2.0;
            if (std::fabs(corr) < 0.5) step /= (1.0 - corr);
            next = x - step;
        } else {
            next = x;
        }
        if (!(next > lo) || !(next < hi)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : (lo > 0 ? 2 * lo : 1.0);
        if (std::fabs(next - x) <= 1e-14 * std::max(1.0, x)) {
            x = next;
            break;
        }
        x = next;
    }
    return x * scale;
}

// Weibull shape from the squared coefficient of variation:
// Gamma(1+2/k) / Gamma(1+1/k)^2 = 1 + cv^2; the left side is decreasing in k.
double weibull_shape_from_cv2(double cv2) {
    const auto f = [](double k) { return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k); };
    const double target = std::log1p(cv2);
    double lo = 1e-2;
    double hi = 1e4;
    while (f(lo) < target && lo > 1e-6) lo *= 0.5;
    while (f(hi) > target && hi < 1e9) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-12 * std::max(1.0, lo)) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Fitted Fitted::fit(Family family, double mean, double variance) {
    if (variance <= 0.0) throw ValidationError("fit: variance must be positive");
    if (family_positive_support(family) && mean <= 0.0)
        throw ValidationError("fit: " + family_name(family) + " requires positive mean");
    Fitted out;
    out.family_ = family;
    switch (family) {
        case Family::Normal:
            out.p1_ = mean;
            out.p2_ = std::sqrt(variance);
            break;
        case Family::Lognormal: {
            const double s2 = std::log1p(variance / (mean * mean));
            out.p1_ = std::log(mean) - 0.5 * s2;
            out.p2_ = std::sqrt(s2);
            break;
        }
        case Family::Gamma:
            out.p1_ = mean * mean / variance;  // shape
            out.p2_ = variance / mean;         // scale
            break;
        case Family::Weibull: {
            const double k = weibull_shape_from_cv2(variance / (mean * mean));
            out.p1_ = k;
            out.p2_ = mean / std::exp(std::lgamma(1.0 + 1.0 / k));
            break;
        }
    }
    return out;
}

double Fitted::cdf(double x) const {
    switch (family_) {
        case Family::Normal: return normal_cdf((x - p1_) / p2_);
        case Family::Lognormal: return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p1_) / p2_);
        case Family::Gamma: return x <= 0.0 ? 0.0 : regularized_gamma_p(p1_, x / p2_);
        case Family::Weibull: return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p2_, p1_));
    }
    return 0.0;
}

double Fitted::log_pdf(double x) const {
    switch (family_) {
        case Family::Normal: {
            const double z = (x - p1_) / p2_;
            return -0.5 * z * z - kLogSqrt2Pi - std::log(p2_);
        }
        case Family::Lognormal: {
            if (x <= 0.0) return -std::numeric_limits<double>::infinity();
            const double z = (std::log(x) - p1_) / p2_;
            return -0.5 * z * z - kLogSqrt2Pi - std::log(p2_) - std::log(x);
        }
        case Family::Gamma: return gamma_log_pdf(p1_, p2_, x);
        case Family::Weibull: {
            if (x <= 0.0) return -std::numeric_limits<double>::infinity();
            const double t = x / p2_;
            return std::log(p1_ / p2_) + (p1_ - 1.0) * std::log(t) - std::pow(t, p1_);
        }
    }
    return 0.0;
}

double Fitted::pdf(double x) const { return std::exp(log_pdf(x)); }

double Fitted::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile: u outside (0,1)");
    switch (family_) {
        case Family::Normal: return p1_ + p2_ * normal_quantile(u);
        case Family::Lognormal: return std::exp(p1_ + p2_ * normal_quantile(u));
        case Family::Gamma: return gamma_quantile(p1_, p2_, u);
        case Family::Weibull: return p2_ * std::pow(-std::log1p(-u), 1.0 / p1_);
    }
    return 0.0;
}

double Fitted::analytic_mean() const {
    switch (family_) {
        case Family::Normal: return p1_;
        case Family::Lognormal: return std::exp(p1_ + 0.5 * p2_ * p2_);
        case Family::Gamma: return p1_ * p2_;
        case Family::Weibull: return p2_ * std::exp(std::lgamma(1.0 + 1.0 / p1_));
    }
    return 0.0;
}

double Fitted::analytic_variance() const {
    switch (family_) {
        case Family::Normal: return p2_ * p2_;
        case Family::Lognormal: {
            const double s2 = p2_ * p2_;
            return std::expm1(s2) * std::exp(2.0 * p1_ + s2);
        }
        case Family::Gamma: return p1_ * p2_ * p2_;
        case Family::Weibull: {
            const double g1 = std::exp(std::lgamma(1.0 + 1.0 / p1_));
            const double g2 = std::exp(std::lgamma(1.0 + 2.0 / p1_));
            return p2_ * p2_ * (g2 - g1 * g1);
        }
    }
    return 0.0;
}

}  // namespace cddp
