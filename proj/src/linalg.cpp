#include "circaug/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "circaug/error.hpp"

namespace circaug {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ValidationError("matrix data length " + std::to_string(data_.size()) + " does not match " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ValidationError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::random_normal(std::size_t rows, std::size_t cols, Rng& rng, double scale) {
    Matrix m(rows, cols);
    for (double& x : m.data_) x = scale * standard_normal(rng);
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

static void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ValidationError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                              std::to_string(b.cols()));
    }
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
    return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw ValidationError("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                              std::to_string(b.rows()) + " differ");
    }
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < out.size(); ++j) out[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ValidationError("matmul_tn: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < arow.size(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            auto out = c.row(i);
            for (std::size_t j = 0; j < brow.size(); ++j) out[j] += aki * brow[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ValidationError("matmul_nt: column counts differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto brow = b.row(j);
            c(i, j) = std::inner_product(arow.begin(), arow.end(), brow.begin(), 0.0);
        }
    }
    return c;
}

double frobenius_norm(const Matrix& a) noexcept {
    double s = 0.0;
    for (double x : a.values()) s += x * x;
    return std::sqrt(s);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

void require_finite(const Matrix& m, const char* what) {
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c)
            if (!std::isfinite(m(r, c))) {
                throw ValidationError(std::string(what) + ": non-finite entry at (" + std::to_string(r) + ", " +
                                      std::to_string(c) + ")");
            }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Modified Gram-Schmidt over the rows of `basis` (each row one vector).
// Rows whose residual collapses, or that are flagged in `replace`, are
// replaced by the standard basis vector with the largest residual.
void orthonormalize_rows(Matrix& basis, const std::vector<bool>& replace) {
    const std::size_t k = basis.rows();
    const std::size_t n = basis.cols();
    for (std::size_t i = 0; i < k; ++i) {
        auto vi = basis.row(i);
        double nrm = 0.0;
        if (!replace[i]) {
            for (std::size_t j = 0; j < i; ++j) {
                const double p = dot(vi, basis.row(j));
                auto vj = basis.row(j);
                for (std::size_t t = 0; t < n; ++t) vi[t] -= p * vj[t];
            }
            nrm = norm2(vi);
        }
        if (replace[i] || nrm < 1e-10) {
            std::vector<double> best;
            double best_norm = -1.0;
            for (std::size_t e = 0; e < n; ++e) {
                std::vector<double> cand(n, 0.0);
                cand[e] = 1.0;
                for (std::size_t j = 0; j < i; ++j) {
                    auto vj = basis.row(j);
                    const double p = vj[e];
                    for (std::size_t t = 0; t < n; ++t) cand[t] -= p * vj[t];
                }
                const double cn = norm2(cand);
                if (cn > best_norm) {
                    best_norm = cn;
                    best = std::move(cand);
                }
            }
            std::copy(best.begin(), best.end(), vi.begin());
            nrm = best_norm;
            // second pass against round-off
            for (std::size_t j = 0; j < i; ++j) {
                const double p = dot(vi, basis.row(j));
                auto vj = basis.row(j);
                for (std::size_t t = 0; t < n; ++t) vi[t] -= p * vj[t];
            }
            nrm = norm2(vi);
        }
        for (double& x : vi) x /= nrm;
    }
}

// One-sided Jacobi on a tall matrix (rows >= cols). `cols_t` holds the
// columns of A as rows; `v_t` holds the columns of V as rows.
SvdResult jacobi_tall(const Matrix& a, const Matrix* v_init) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    Matrix v_t = Matrix::identity(n);
    if (v_init != nullptr) {
        v_t = transpose(*v_init);
        orthonormalize_rows(v_t, std::vector<bool>(n, false));
    }
    // columns of A * V as rows
    Matrix cols_t = matmul_nt(v_t, a);

    constexpr double kTol = 1e-15;
    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto ap = cols_t.row(p);
                auto aq = cols_t.row(q);
                const double alpha = dot(ap, ap);
                const double beta = dot(aq, aq);
                const double gamma = dot(ap, aq);
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= kTol * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < m; ++k) {
                    const double x = ap[k];
                    const double y = aq[k];
                    ap[k] = c * x - s * y;
                    aq[k] = s * x + c * y;
                }
                auto vp = v_t.row(p);
                auto vq = v_t.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    const double x = vp[k];
                    const double y = vq[k];
                    vp[k] = c * x - s * y;
                    vq[k] = s * x + c * y;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(cols_t.row(j));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    const double top = n ? norms[order[0]] : 0.0;
    SvdResult out;
    out.sigma.resize(n);
    Matrix u_t(n, m);
    Matrix vs_t(n, n);
    std::vector<bool> null_dir(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = order[k];
        double s = norms[j];
        if (top == 0.0 || s < 1e-12 * top) s = 0.0;
        out.sigma[k] = s;
        auto dst = u_t.row(k);
        auto src = cols_t.row(j);
        if (s > 0.0) {
            for (std::size_t t = 0; t < m; ++t) dst[t] = src[t] / norms[j];
        } else {
            null_dir[k] = true;
        }
        auto vsrc = v_t.row(j);
        std::copy(vsrc.begin(), vsrc.end(), vs_t.row(k).begin());
    }
    orthonormalize_rows(u_t, null_dir);
    out.u = transpose(u_t);
    out.v = transpose(vs_t);
    return out;
}

SvdResult svd_impl(const Matrix& w, const SvdResult* warm) {
    if (w.rows() == 0 || w.cols() == 0) throw ValidationError("svd: empty matrix");
    require_finite(w, "svd input");
    if (w.rows() >= w.cols()) {
        const Matrix* init = nullptr;
        if (warm != nullptr && warm->v.rows() == w.cols() && warm->v.cols() == w.cols()) init = &warm->v;
        return jacobi_tall(w, init);
    }
    const Matrix* init = nullptr;
    if (warm != nullptr && warm->u.rows() == w.rows() && warm->u.cols() == w.rows()) init = &warm->u;
    SvdResult t = jacobi_tall(transpose(w), init);
    return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

}  // namespace

SvdResult svd(const Matrix& w) { return svd_impl(w, nullptr); }

SvdResult svd(const Matrix& w, const SvdResult& warm_start) { return svd_impl(w, &warm_start); }

Matrix reconstruct(const SvdResult& s) {
    Matrix us = s.u;
    for (std::size_t r = 0; r < us.rows(); ++r)
        for (std::size_t c = 0; c < us.cols(); ++c) us(r, c) *= s.sigma[c];
    return matmul_nt(us, s.v);
}

PowerIterState PowerIterState::random(std::size_t rows, Rng& rng) {
    PowerIterState st;
    st.u.resize(rows);
    double nrm = 0.0;
    while (nrm == 0.0) {
        for (double& x : st.u) x = standard_normal(rng);
        nrm = norm2(st.u);
    }
    for (double& x : st.u) x /= nrm;
    return st;
}

SpectralNormEstimate spectral_norm(const Matrix& w, const PowerIterState& state, std::size_t iters) {
    if (iters == 0) throw ValidationError("spectral_norm: iters must be >= 1");
    if (state.u.size() != w.rows()) {
        throw ValidationError("spectral_norm: state length " + std::to_string(state.u.size()) +
                              " does not match matrix rows " + std::to_string(w.rows()));
    }
    SpectralNormEstimate est{0.0, state};
    if (frobenius_norm(w) == 0.0) return est;

    std::vector<double>& u = est.state.u;
    std::vector<double> v(w.cols());
    for (std::size_t it = 0; it < iters; ++it) {
        std::fill(v.begin(), v.end(), 0.0);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            auto row = w.row(r);
            for (std::size_t c = 0; c < v.size(); ++c) v[c] += row[c] * u[r];
        }
        double nv = norm2(v);
        if (nv == 0.0) {
            // u is orthogonal to the range of w; restart from the heaviest row.
            std::size_t best = 0;
            double best_norm = -1.0;
            for (std::size_t r = 0; r < w.rows(); ++r) {
                const double rn = norm2(w.row(r));
                if (rn > best_norm) {
                    best_norm = rn;
                    best = r;
                }
            }
            auto row = w.row(best);
            std::copy(row.begin(), row.end(), v.begin());
            nv = best_norm;
        }
        for (double& x : v) x /= nv;
        for (std::size_t r = 0; r < w.rows(); ++r) u[r] = dot(w.row(r), v);
        const double nu = norm2(u);
        for (double& x : u) x /= nu;
        est.sigma = nu;
    }
    return est;
}

}  // namespace circaug
