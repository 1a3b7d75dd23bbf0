#include "qbm/special.hpp"

#include <cmath>

namespace qbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// B_{2n}/(2n) for the asymptotic series of psi.
constexpr double kBernTerms[] = {
    1.0 / 12.0,  -1.0 / 120.0,     1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
};

bool is_nonpositive_integer(complex z) {
    if (z.imag() != 0.0) return false;
    double r = z.real();
    return r <= 0.0 && r == std::floor(r);
}

void check_resonance(double a, double guard) {
    double nearest = std::round(a);
    if (nearest >= 1.0 && std::abs(a - nearest) < guard)
        throw ResonanceError("matsubara sum: Lambda/(2 pi T) within resonance guard of integer " +
                             std::to_string(static_cast<long>(nearest)));
}

}  // namespace

complex digamma(complex z) {
    if (is_nonpositive_integer(z))
        throw PoleError("digamma: pole at non-positive integer");

    complex result = 0.0;
    if (z.real() < 0.5) {
        complex piz = kPi * z;
        result -= kPi * std::cos(piz) / std::sin(piz);
        z = 1.0 - z;
    }
    while (std::abs(z) < 12.0) {
        result -= 1.0 / z;
        z += 1.0;
    }
    complex inv = 1.0 / z;
    complex inv2 = inv * inv;
    result += std::log(z) - 0.5 * inv;
    complex p = inv2;
    for (double coeff : kBernTerms) {
        result -= coeff * p;
        p *= inv2;
    }
    return result;
}

double cot(double x) { return std::cos(x) / std::sin(x); }

double cot_minus_pole(double x) {
    if (std::abs(x) < 0.25) {
        double x2 = x * x;
        return -x * (1.0 / 3.0 + x2 * (1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 / 4725.0)));
    }
    return cot(x) - 1.0 / x;
}

namespace detail {

namespace {

// 32-point Gauss-Legendre nodes/weights (positive half).
constexpr double kGlNodes[16] = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371, 0.3318686022821277,
    0.4213512761306353, 0.5068999089322294, 0.5877157572407623, 0.6630442669302152,
    0.7321821187402897, 0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684, 0.9972638618494816,
};
constexpr double kGlWeights[16] = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701,
};

}  // namespace

double raw_sum(const std::function<double(double)>& term, long cut) {
    double sum = 0.0;
    for (long l = cut; l >= 1; --l) sum += term(static_cast<double>(l));
    return sum;
}

SeriesValue sum_with_tail(const std::function<double(double)>& term, double l_scale,
                          const MatsubaraConfig& cfg, int min_terms) {
    long cut =
        static_cast<long>(std::ceil(std::max(static_cast<double>(min_terms), 4.0 * l_scale)));
    if (cut > cfg.max_terms)
        throw NonConvergence("matsubara sum: required term count exceeds max_terms");
    double sum = raw_sum(term, cut);

    // Midpoint Euler-Maclaurin: sum_{l>cut} t(l) ~ int_{cut+1/2} t dl + t'(cut+1/2)/24.
    double a = cut + 0.5;
    double tail = 0.0;
    for (int i = 0; i < 16; ++i) {
        for (double u : {0.5 * (1.0 - kGlNodes[i]), 0.5 * (1.0 + kGlNodes[i])}) {
            tail += 0.5 * kGlWeights[i] * term(a / u) * a / (u * u);
        }
    }
    double h = 1e-3 * a;
    double tprime = (term(a + h) - term(a - h)) / (2.0 * h);
    tail += tprime / 24.0;
    return {sum + tail, std::abs(tail) + std::abs(tprime) / 24.0};
}

}  // namespace detail

double matsubara_F(double lambda, double omega_r, double gamma, double temperature,
                   const MatsubaraConfig& cfg, SeriesValue* detail_out) {
    cfg.validate();
    if (!(temperature > 0.0)) throw DomainError("matsubara_F: requires T > 0");
    double twoPiT = 2.0 * kPi * temperature;
    double a = lambda / twoPiT, b = omega_r / twoPiT, c = gamma / twoPiT;
    check_resonance(a, cfg.resonance_guard);
    double a2 = a * a, b2 = b * b, c2 = c * c;
    auto term = [=](double l) {
        double l2 = l * l;
        return l / ((l2 - a2) * ((l2 + b2) * (l2 + b2) - l2 * c2));
    };
    SeriesValue s = detail::sum_with_tail(term, a, cfg);
    double scale = a2 / (4.0 * kPi * kPi * kPi);
    if (detail_out) *detail_out = {scale * s.value, scale * s.tail_bound};
    return scale * s.value;
}

double matsubara_I(double lambda, double omega_r, double gamma, double temperature,
                   const MatsubaraConfig& cfg, SeriesValue* detail_out) {
    cfg.validate();
    if (!(temperature > 0.0)) throw DomainError("matsubara_I: requires T > 0");
    double twoPiT = 2.0 * kPi * temperature;
    double a = lambda / twoPiT, b = omega_r / twoPiT, c = gamma / twoPiT;
    check_resonance(a, cfg.resonance_guard);
    double a2 = a * a, b2 = b * b, c2 = c * c;
    auto term = [=](double l) {
        double l2 = l * l;
        return l * l2 / ((l2 - a2) * ((l2 + b2) * (l2 + b2) - l2 * c2));
    };
    SeriesValue s = detail::sum_with_tail(term, a, cfg);
    double scale = -a2 / kPi;
    if (detail_out) *detail_out = {scale * s.value, std::abs(scale) * s.tail_bound};
    return scale * s.value - 0.5 * cot(kPi * a);
}

}  // namespace qbm
