#include "ringshape/demapper.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "ringshape/errors.hpp"

namespace ringshape {

void DemapConfig::validate() const {
    if (spec == nullptr) throw ConfigError("demapper: missing constellation");
    if (static_cast<int>(log_priors.size()) != spec->augmented_size())
        throw ConfigError("demapper: prior vector length mismatch");
    if (!(n0 > 0.0)) throw ConfigError("demapper: noise variance must be positive");
    if (epsilon < 0.0) throw ConfigError("demapper: epsilon must be >= 0");
    double mass = 0.0;
    for (double lp : log_priors) mass += std::exp(lp);
    if (std::abs(mass - 1.0) > 1e-9) throw ConfigError("demapper: priors do not sum to 1");
}

std::vector<double> compute_llrs(std::span<const cplx> equalized, const DemapConfig& config) {
    config.validate();
    if (equalized.empty()) throw ConfigError("demapper: empty input");

    const ConstellationSpec& spec = *config.spec;
    const int l = spec.order();
    const int q = 2 * l;
    const int n_bits = spec.bits_per_symbol;
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();

    // label -> the two augmented point indices sharing it
    std::vector<std::array<int, 2>> members(l);
    std::vector<int> fill(l, 0);
    for (int i = 0; i < q; ++i) {
        const int lab = static_cast<int>(spec.label_of_point(i));
        members[lab][fill[lab]++] = i;
    }

    std::vector<double> llrs;
    llrs.reserve(equalized.size() * n_bits);
    std::vector<double> u(q), lambda(l);

    for (const cplx y : equalized) {
        for (int i = 0; i < q; ++i) {
            u[i] = -std::norm(y - spec.point(i)) / config.n0 + config.log_priors[i];
        }
        for (int lab = 0; lab < l; ++lab) {
            const double u0 = u[members[lab][0]];
            const double u1 = u[members[lab][1]];
            const double m = std::max(u0, u1);
            if (m == neg_inf) {
                lambda[lab] = config.epsilon > 0.0 ? std::log(config.epsilon) : neg_inf;
            } else {
                const double s = std::exp(u0 - m) + std::exp(u1 - m);
                lambda[lab] = m + std::log(s + config.epsilon);
            }
        }
        for (int b = 0; b < n_bits; ++b) {
            double m0 = neg_inf, m1 = neg_inf;
            for (int lab = 0; lab < l; ++lab) {
                if ((lab >> b) & 1) {
                    m1 = std::max(m1, lambda[lab]);
                } else {
                    m0 = std::max(m0, lambda[lab]);
                }
            }
            double s0 = 0.0, s1 = 0.0;
            for (int lab = 0; lab < l; ++lab) {
                if ((lab >> b) & 1) {
                    s1 += std::exp(lambda[lab] - m1);
                } else {
                    s0 += std::exp(lambda[lab] - m0);
                }
            }
            const double t0 = m0 == neg_inf ? std::log(config.epsilon) : m0 + std::log(s0 + config.epsilon);
            const double t1 = m1 == neg_inf ? std::log(config.epsilon) : m1 + std::log(s1 + config.epsilon);
            llrs.push_back(t0 - t1);
        }
    }
    return llrs;
}

} // namespace ringshape
