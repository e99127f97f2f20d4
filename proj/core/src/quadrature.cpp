#include "dck/quadrature.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <limits>

#include "dck/error.hpp"

namespace dck {

namespace {

constexpr std::size_t kPoints = 8;

struct Rule {
    std::array<double, kPoints> nodes{};
    std::array<double, kPoints> weights{};
};

// Boost stores the non-negative half of the symmetric rule.
Rule make_rule() {
    using Gauss = boost::math::quadrature::gauss<double, kPoints>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weight = Gauss::weights();
    Rule r;
    std::size_t k = 0;
    for (std::size_t i = abscissa.size(); i-- > 0;) {
        if (abscissa[i] == 0.0) continue;
        r.nodes[k] = -abscissa[i];
        r.weights[k] = weight[i];
        ++k;
    }
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        r.nodes[k] = abscissa[i];
        r.weights[k] = weight[i];
        ++k;
    }
    return r;
}

const Rule& rule() {
    static const Rule r = make_rule();
    return r;
}

void merge_breaks(std::vector<double>& edges, double a, double b, std::span<const double> breaks) {
    for (double x : breaks) {
        if (x > a && x < b) edges.push_back(x);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

}  // namespace

void QuadratureConfig::validate() const {
    if (panels < 1 || graded_panels < 0 || convolution_panels < 1 || max_refinements < 0) {
        throw InputError("quadrature: panel counts must be positive");
    }
    if (!(grading_ratio > 0.0 && grading_ratio < 1.0)) {
        throw InputError("quadrature: grading ratio must lie in (0, 1)");
    }
    if (!(tolerance > 0.0)) throw InputError("quadrature: tolerance must be > 0");
}

QuadratureConfig QuadratureConfig::refined(int levels) const {
    QuadratureConfig c = *this;
    for (int i = 0; i < levels; ++i) {
        c.panels *= 2;
        c.graded_panels *= 2;
        c.convolution_panels *= 2;
    }
    return c;
}

std::span<const double> gauss_legendre_nodes() { return rule().nodes; }

std::span<const double> gauss_legendre_weights() { return rule().weights; }

std::vector<double> unit_panel_edges(const QuadratureConfig& cfg, std::span<const double> breaks,
                                     bool graded_at_zero) {
    std::vector<double> edges;
    edges.reserve(static_cast<std::size_t>(cfg.panels + cfg.graded_panels) + breaks.size() + 2);
    const double h = 1.0 / cfg.panels;
    edges.push_back(0.0);
    if (graded_at_zero) {
        double x = h;
        for (int j = 0; j < cfg.graded_panels; ++j) {
            x *= cfg.grading_ratio;
            if (x < std::numeric_limits<double>::min()) break;
            edges.push_back(x);
        }
    }
    for (int i = 1; i <= cfg.panels; ++i) edges.push_back(i == cfg.panels ? 1.0 : i * h);
    merge_breaks(edges, 0.0, 1.0, breaks);
    return edges;
}

std::vector<double> interval_panel_edges(double a, double b, int panels_per_segment, std::span<const double> breaks) {
    std::vector<double> cuts{a, b};
    merge_breaks(cuts, a, b, breaks);
    std::vector<double> edges;
    edges.reserve((cuts.size() - 1) * static_cast<std::size_t>(panels_per_segment) + 1);
    edges.push_back(a);
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        for (int p = 1; p <= panels_per_segment; ++p) {
            edges.push_back(p == panels_per_segment ? hi : lo + (hi - lo) * p / panels_per_segment);
        }
    }
    return edges;
}

}  // namespace dck
