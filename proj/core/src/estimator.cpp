#include "dck/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dck/error.hpp"
#include "dck/parallel.hpp"
#include "dck/time_grid.hpp"

namespace dck {

namespace {

using Index = Eigen::Index;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double input_value(const InputSignal& input, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(overloaded{
                          [x](const SampledZOH& z) {
                              const auto it = std::upper_bound(z.times.begin(), z.times.end(), x);
                              if (it == z.times.begin()) return 0.0;
                              return z.values[static_cast<std::size_t>(it - z.times.begin()) - 1];
                          },
                          [](const ImpulseInput&) { return 0.0; },
                          [](const StepInput&) { return 1.0; },
                          [x](const ExpSumInput& e) {
                              double sum = 0.0;
                              for (const auto& [c, gamma] : e.terms) sum += c * std::exp(-gamma * x);
                              return sum;
                          },
                      },
                      input);
}

bool is_impulse(const InputSignal& input) { return std::holds_alternative<ImpulseInput>(input); }

bool is_zero_input(const InputSignal& input) {
    if (const auto* z = std::get_if<SampledZOH>(&input)) {
        return z->times.empty() || std::all_of(z->values.begin(), z->values.end(), [](double v) { return v == 0.0; });
    }
    if (const auto* e = std::get_if<ExpSumInput>(&input)) {
        return std::all_of(e->terms.begin(), e->terms.end(), [](const auto& term) { return term.first == 0.0; });
    }
    return false;
}

// Upper end of the convolution range for lag variable over [0, x]: the input
// vanishes for arguments before its first sample.
double support_end(const InputSignal& input, double x) {
    if (const auto* z = std::get_if<SampledZOH>(&input)) return z->times.empty() ? 0.0 : x - z->times.front();
    return x;
}

// Lags where u(x - lag) jumps.
void append_input_breaks(const InputSignal& input, double x, std::vector<double>& out) {
    if (const auto* z = std::get_if<SampledZOH>(&input)) {
        for (double tk : z->times) out.push_back(x - tk);
    }
}

int panels_per_segment(const InputSignal& input, const QuadratureConfig& cfg) {
    if (std::holds_alternative<SampledZOH>(input)) return std::max(1, (cfg.convolution_panels + 3) / 4);
    return cfg.convolution_panels;
}

}  // namespace

void Dataset::validate() const {
    require_strictly_increasing(output_times, "output times");
    if (!output_times.empty() && output_times.front() < 0.0) throw InputError("output times must be >= 0");
    if (static_cast<std::size_t>(outputs.size()) != output_times.size()) {
        std::ostringstream os;
        os << "got " << outputs.size() << " outputs for " << output_times.size() << " output times";
        throw InputError(os.str());
    }
    if (!outputs.allFinite()) throw InputError("outputs must be finite");
    if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) throw InputError("noise variance must be >= 0");
    if (const auto* z = std::get_if<SampledZOH>(&input)) {
        if (z->times.size() != z->values.size()) throw InputError("input times and values differ in length");
        require_strictly_increasing(z->times, "input times");
        if (!z->times.empty() && z->times.front() < 0.0) throw InputError("input times must be >= 0");
        for (double v : z->values) {
            if (!std::isfinite(v)) throw InputError("input values must be finite");
        }
    }
    if (const auto* e = std::get_if<ExpSumInput>(&input)) {
        for (const auto& [c, gamma] : e->terms) {
            if (!std::isfinite(c) || !std::isfinite(gamma)) throw InputError("exp-sum input terms must be finite");
        }
    }
}

ConvolutionModel::ConvolutionModel(KernelSpec spec, Dataset data, QuadratureConfig cfg)
    : spec_(spec), data_(std::move(data)), cfg_(cfg) {
    data_.validate();
    cfg_.validate();
}

double ConvolutionModel::section(double t, std::size_t j) const { return section_at(t, data_.output_times.at(j)); }

double ConvolutionModel::section_at(double t, double s) const {
    if (!(t >= 0.0) || !(s >= 0.0)) throw InputError("convolution times must be >= 0");
    const InputSignal& u = data_.input;
    if (is_impulse(u)) return eval_kernel(spec_, t, s);
    const double upper = support_end(u, s);
    if (upper <= 0.0 || is_zero_input(u)) return 0.0;
    std::vector<double> breaks{t};
    append_input_breaks(u, s, breaks);
    const auto edges = interval_panel_edges(0.0, upper, panels_per_segment(u, cfg_), breaks);
    return integrate_panels(edges, [&](double lag) { return eval_kernel(spec_, t, lag) * input_value(u, s - lag); });
}

double ConvolutionModel::output_entry(double t, double s) const {
    const InputSignal& u = data_.input;
    if (is_impulse(u)) return eval_kernel(spec_, t, s);
    const double upper = support_end(u, t);
    if (upper <= 0.0 || is_zero_input(u)) return 0.0;
    // a(., s) loses smoothness where its own inner integrand does.
    std::vector<double> breaks{s};
    append_input_breaks(u, t, breaks);
    append_input_breaks(u, s, breaks);
    const auto edges = interval_panel_edges(0.0, upper, panels_per_segment(u, cfg_), breaks);
    return integrate_panels(edges, [&](double lag) { return section_at(lag, s) * input_value(u, t - lag); });
}

Eigen::MatrixXd ConvolutionModel::output_gram() const {
    const auto n = static_cast<Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    const auto& times = data_.output_times;
    parallel_for(size(), [&](std::size_t begin, std::size_t end) {
        for (auto i = static_cast<Index>(begin); i < static_cast<Index>(end); ++i) {
            for (Index j = i; j < n; ++j) {
                a(i, j) = output_entry(times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)]);
            }
        }
    });
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < i; ++j) a(i, j) = a(j, i);
    }
    return a;
}

double ConvolutionModel::predicted_output(double t, const Eigen::VectorXd& coefficients) const {
    if (static_cast<std::size_t>(coefficients.size()) != size()) throw InputError("coefficient count mismatch");
    double sum = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
        const double c = coefficients(static_cast<Index>(j));
        if (c != 0.0) sum += c * output_entry(t, data_.output_times[j]);
    }
    return sum;
}

OutputKernel output_kernel(const KernelSpec& spec, const Dataset& data, const QuadratureConfig& cfg) {
    auto model = std::make_shared<const ConvolutionModel>(spec, data, cfg);
    return OutputKernel{model->output_gram(), model};
}

Eigen::VectorXd solve_regularized(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("regularization weight must be > 0");
    if (gram.rows() != gram.cols() || gram.rows() != y.size()) throw InputError("system dimensions do not match");
    Eigen::MatrixXd m = gram;
    m.diagonal().array() += gamma;
    const Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw ConditioningError("A + gamma I is not numerically positive definite");
    Eigen::VectorXd c = llt.solve(y);
    for (int step = 0; step < 2; ++step) c += llt.solve(y - m * c);
    if (!c.allFinite()) throw ConditioningError("regularized solve produced non-finite coefficients");
    return c;
}

EstimateResult estimate(const OutputKernel& ok, std::optional<double> gamma) {
    const double g = gamma.value_or(ok.model->data().noise_variance);
    if (!(g > 0.0)) throw InputError("no positive regularization weight: give gamma or a positive noise variance");
    EstimateResult r;
    r.gamma = g;
    r.gram = ok.gram;
    r.model = ok.model;
    const Eigen::VectorXd& y = ok.model->data().outputs;
    r.coefficients = solve_regularized(ok.gram, y, g);
    r.residual = (ok.gram * r.coefficients + g * r.coefficients - y).norm();
    return r;
}

double reconstruct(const EstimateResult& result, double t) {
    if (!(t >= 0.0)) throw InputError("reconstruction time must be >= 0");
    double sum = 0.0;
    for (Index j = 0; j < result.coefficients.size(); ++j) {
        const double c = result.coefficients(j);
        if (c != 0.0) sum += c * result.model->section(t, static_cast<std::size_t>(j));
    }
    return sum;
}

GammaSearch grid_search_gamma(const OutputKernel& ok, std::vector<double> gammas) {
    if (gammas.empty()) throw InputError("gamma grid is empty");
    for (double g : gammas) {
        if (!(g > 0.0) || !std::isfinite(g)) throw InputError("gamma grid values must be > 0");
    }
    const auto n = static_cast<Index>(ok.model->size());
    if (n < 5) throw InputError("held-out split needs at least 5 outputs");
    std::sort(gammas.begin(), gammas.end());
    GammaSearch out;
    out.holdout = static_cast<std::size_t>((n + 4) / 5);
    const auto held = static_cast<Index>(out.holdout);
    const Index fit = n - held;
    const Eigen::VectorXd& y = ok.model->data().outputs;
    const Eigen::MatrixXd train = ok.gram.topLeftCorner(fit, fit);
    const Eigen::MatrixXd cross = ok.gram.bottomLeftCorner(held, fit);
    double best_loss = 0.0;
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        const Eigen::VectorXd c = solve_regularized(train, y.head(fit), gammas[k]);
        const double loss = (y.tail(held) - cross * c).squaredNorm();
        out.gammas.push_back(gammas[k]);
        out.losses.push_back(loss);
        if (k == 0 || loss <= best_loss) {
            best_loss = loss;
            out.best = gammas[k];
        }
    }
    return out;
}

double normalized_fit(const Eigen::VectorXd& y, const Eigen::VectorXd& predicted) {
    if (y.size() != predicted.size() || y.size() == 0) throw InputError("fit needs equal, nonempty vectors");
    const double spread = (y.array() - y.mean()).matrix().norm();
    const double err = (y - predicted).norm();
    if (spread == 0.0) return err == 0.0 ? 100.0 : -std::numeric_limits<double>::infinity();
    return 100.0 * (1.0 - err / spread);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw InputError("log grid needs 0 < lo <= hi and n >= 1");
    std::vector<double> out(n);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = n == 1 ? lo : std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return out;
}

}  // namespace dck
