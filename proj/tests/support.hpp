#pragma once

// Reference computations shared by the unit and acceptance tests. The
// oracles never call the library's numeric kernels; the property sweeps do.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "circaug/linalg.hpp"
#include "circaug/nn.hpp"
#include "circaug/oracle.hpp"

namespace circaug::testing {

/// ‖A − B‖_F by explicit loops.
inline double frob_diff(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) s += (a(r, c) - b(r, c)) * (a(r, c) - b(r, c));
    return std::sqrt(s);
}

/// ‖QᵀQ − I‖_F for the columns of q.
inline double orthogonality_error(const Matrix& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.cols(); ++i)
        for (std::size_t j = 0; j < q.cols(); ++j) {
            long double d = 0.0L;
            for (std::size_t r = 0; r < q.rows(); ++r) d += static_cast<long double>(q(r, i)) * q(r, j);
            const double e = static_cast<double>(d) - (i == j ? 1.0 : 0.0);
            s += e * e;
        }
    return std::sqrt(s);
}

/// U diag(sigma) Vᵀ by a triple loop.
inline Matrix naive_reconstruct(const SvdResult& s) {
    Matrix out(s.u.rows(), s.v.rows());
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < s.sigma.size(); ++k) acc += s.u(i, k) * s.sigma[k] * s.v(j, k);
            out(i, j) = acc;
        }
    return out;
}

inline double naive_activation(const Activation& a, double x) {
    switch (a.kind) {
        case ActivationKind::leaky_relu: return x > 0.0 ? x : a.alpha * x;
        case ActivationKind::tanh: return std::tanh(x);
        case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::linear: return x;
    }
    return x;
}

/// Per-element forward pass of an MLP on one input row.
inline std::vector<double> naive_forward(const MlpParams& p, std::vector<double> x) {
    for (const auto& layer : p.layers) {
        std::vector<double> y(layer.spec.out_dim);
        for (std::size_t o = 0; o < layer.spec.out_dim; ++o) {
            double acc = layer.bias[o];
            for (std::size_t i = 0; i < layer.spec.in_dim; ++i) acc += layer.weights(o, i) * x[i];
            y[o] = naive_activation(layer.spec.activation, acc);
        }
        x = std::move(y);
    }
    return x;
}

/// −[y ln p + (1 − y) ln(1 − p)] averaged, in long double.
inline double naive_bce(const std::vector<double>& logits, const std::vector<double>& labels) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const long double p = 1.0L / (1.0L + std::exp(-static_cast<long double>(logits[i])));
        total += -(labels[i] * std::log(p) + (1.0L - labels[i]) * std::log(1.0L - p));
    }
    return static_cast<double>(total / logits.size());
}

/// Σ weight[r][o] · f(x_r)[o] through naive_forward.
inline double weighted_output(const MlpParams& p, const Matrix& batch, const Matrix& weight) {
    long double total = 0.0L;
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        const auto row = batch.row(r);
        const std::vector<double> y = naive_forward(p, std::vector<double>(row.begin(), row.end()));
        for (std::size_t o = 0; o < y.size(); ++o) total += static_cast<long double>(weight(r, o)) * y[o];
    }
    return static_cast<double>(total);
}

/// Largest relative gap between backward() and central differences of
/// weighted_output over every weight, bias and input entry.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline double gradient_check_error(const MlpParams& params, const Matrix& batch, const Matrix& weight,
                                   double h = 1e-5, double floor = 1e-6) {
    const ForwardPass fp = forward(params, batch);
    const Gradients g = backward(params, fp.cache, weight);
    double worst = 0.0;
    auto record = [&](double analytic, double numeric) {
        const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
        worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    MlpParams p = params;
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        Matrix& w = p.layers[l].weights;
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                const double keep = w(i, j);
                w(i, j) = keep + h;
                const double up = weighted_output(p, batch, weight);
                w(i, j) = keep - h;
                const double down = weighted_output(p, batch, weight);
                w(i, j) = keep;
                record(g.layers[l].weights(i, j), (up - down) / (2.0 * h));
            }
        std::vector<double>& b = p.layers[l].bias;
        for (std::size_t i = 0; i < b.size(); ++i) {
            const double keep = b[i];
            b[i] = keep + h;
            const double up = weighted_output(p, batch, weight);
            b[i] = keep - h;
            const double down = weighted_output(p, batch, weight);
            b[i] = keep;
            record(g.layers[l].bias[i], (up - down) / (2.0 * h));
        }
    }
    Matrix x = batch;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double keep = x(i, j);
            x(i, j) = keep + h;
            const double up = weighted_output(params, x, weight);
            x(i, j) = keep - h;
            const double down = weighted_output(params, x, weight);
            x(i, j) = keep;
            record(g.input(i, j), (up - down) / (2.0 * h));
        }
    return worst;
}

/// Largest singular value by long-double power iteration on WᵀW from a fixed
/// start, stopped once the Rayleigh quotient settles.
inline double naive_sigma1(const Matrix& w) {
    const std::size_t m = w.rows(), n = w.cols();
    std::vector<long double> v(n), wv(m);
    for (std::size_t j = 0; j < n; ++j) v[j] = 1.0L + 0.01L * static_cast<long double>(j);
    long double prev = -1.0L, sq = 0.0L;
    for (int it = 0; it < 200000; ++it) {
        long double norm = 0.0L;
        for (long double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0L) return 0.0;
        for (long double& x : v) x /= norm;
        sq = 0.0L;
        for (std::size_t i = 0; i < m; ++i) {
            wv[i] = 0.0L;
            for (std::size_t j = 0; j < n; ++j) wv[i] += static_cast<long double>(w(i, j)) * v[j];
            sq += wv[i] * wv[i];
        }
        if (std::abs(sq - prev) <= 1e-17L * sq) break;
        prev = sq;
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = 0.0L;
            for (std::size_t i = 0; i < m; ++i) v[j] += static_cast<long double>(w(i, j)) * wv[i];
        }
    }
    return static_cast<double>(std::sqrt(sq));
}

/// Uniform over the default gate-dataset ranges, all five corners.
inline ProcessPoint random_point(Rng& rng) {
    ProcessPoint p;
    p.vdd = uniform(rng, 1.6, 2.0);
    p.temp = uniform(rng, -40, 125);
    p.corner = static_cast<Corner>(std::uniform_int_distribution<int>(0, 4)(rng));
    p.c_load = uniform(rng, 5, 15) * 1e-15;
    p.input_slew = uniform(rng, 20, 80) * 1e-12;
    p.nmos = {uniform(rng, 0.8, 1.6) * 1e-6, uniform(rng, 0.18, 0.22) * 1e-6, uniform(rng, 3.8, 4.2) * 1e-9,
              uniform(rng, -0.03, 0.03), uniform(rng, 0.9, 1.1)};
    p.pmos = {uniform(rng, 1.6, 3.2) * 1e-6, uniform(rng, 0.18, 0.22) * 1e-6, uniform(rng, 3.8, 4.2) * 1e-9,
              uniform(rng, -0.03, 0.03), uniform(rng, 0.9, 1.1)};
    return p;
}

/// Strict-monotonicity failures on a 5^4 lattice of c_load, temp, vdd and w
/// for NAND2, NOR2 and FA at three corners. Every pin delay must increase
/// in c_load and temp and decrease in vdd and w.
inline std::size_t monotonicity_violations() {
    const double loads[] = {5, 7.5, 10, 12.5, 15};
    const double temps[] = {-40, 0, 27, 80, 125};
    const double vdds[] = {1.6, 1.7, 1.8, 1.9, 2.0};
    const double widths[] = {0.8, 1.0, 1.2, 1.4, 1.6};
    auto at = [&](GateKind g, int il, int it, int iv, int iw, Corner c) {
        ProcessPoint p;
        p.corner = c;
        p.c_load = loads[il] * 1e-15;
        p.temp = temps[it];
        p.vdd = vdds[iv];
        p.nmos.w = widths[iw] * 1e-6;
        p.pmos.w = 2.0 * widths[iw] * 1e-6;
        return gate_delay(g, p);
    };
    auto all_less = [](const DelayResult& a, const DelayResult& b) {
        for (std::size_t i = 0; i < a.pins.size(); ++i)
            if (!(a.pins[i].lh < b.pins[i].lh && a.pins[i].hl < b.pins[i].hl)) return false;
        return true;
    };
    std::size_t violations = 0;
    for (GateKind g : {GateKind::NAND2, GateKind::NOR2, GateKind::FA})
        for (Corner c : {Corner::TT, Corner::SS, Corner::FS})
            for (int a = 0; a < 5; ++a)
                for (int b = 0; b < 5; ++b)
                    for (int d = 0; d < 5; ++d)
                        for (int e = 0; e < 4; ++e) {
                            violations += !all_less(at(g, e, a, b, d, c), at(g, e + 1, a, b, d, c));
                            violations += !all_less(at(g, a, e, b, d, c), at(g, a, e + 1, b, d, c));
                            violations += !all_less(at(g, a, b, e + 1, d, c), at(g, a, b, e, d, c));
                            violations += !all_less(at(g, a, b, d, e + 1, c), at(g, a, b, d, e, c));
                        }
    return violations;
}

/// Max over every input-to-output path of the summed worst pin delays.
/// Paths are listed explicitly, then summed from the input side.
inline double brute_force_critical_path(const Netlist& net, const ProcessPoint& point,
                                        const OracleConstants& k = default_constants()) {
    std::vector<double> worst(net.gates().size());
    for (std::size_t g = 0; g < worst.size(); ++g) worst[g] = gate_delay(net.gates()[g].kind, point, k).worst();

    std::vector<std::vector<std::size_t>> paths;  // gate indices, output side first
    std::vector<std::size_t> stack;
    auto walk = [&](auto&& self, const Driver& d) -> void {
        if (d.kind == Driver::Kind::primary_input) {
            paths.push_back(stack);
            return;
        }
        stack.push_back(d.index);
        for (const Driver& in : net.fanin()[d.index]) self(self, in);
        stack.pop_back();
    };
    for (const Driver& d : net.output_drivers()) walk(walk, d);

    double best = 0.0;
    for (const auto& path : paths) {
        double sum = 0.0;
        for (auto it = path.rbegin(); it != path.rend(); ++it) sum += worst[*it];
        best = std::max(best, sum);
    }
    return best;
}

}  // namespace circaug::testing
