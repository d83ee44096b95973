#include "hcs/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcs {

RealMatrix RealMatrix::identity(std::size_t n) {
    RealMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

RealMatrix RealMatrix::transposed() const {
    RealMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

RealMatrix& RealMatrix::operator*=(double s) noexcept {
    for (auto& v : data_) v *= s;
    return *this;
}

RealMatrix& RealMatrix::operator+=(const RealMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

RealMatrix& RealMatrix::operator-=(const RealMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw std::invalid_argument("matrix shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

double RealMatrix::norm() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

double RealMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    RealMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

RealMatrix operator+(RealMatrix a, const RealMatrix& b) { return a += b; }
RealMatrix operator-(RealMatrix a, const RealMatrix& b) { return a -= b; }
RealMatrix operator*(double s, RealMatrix a) { return a *= s; }

std::vector<double> operator*(const RealMatrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

RealMatrix gram(const RealMatrix& a) {
    RealMatrix g(a.cols(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const auto row = a.row(r);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ri = row[i];
            if (ri == 0.0) continue;
            for (std::size_t j = i; j < a.cols(); ++j) g(i, j) += ri * row[j];
        }
    }
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

std::vector<double> symmetric_eigenvalues(const RealMatrix& input, double tol) {
    if (input.rows() != input.cols()) throw std::invalid_argument("symmetric_eigenvalues: matrix not square");
    const std::size_t n = input.rows();
    RealMatrix a = input;
    const double scale = a.norm();
    std::vector<double> eig(n);
    if (scale == 0.0 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
        return eig;
    }
    const double threshold = tol * scale;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) <= threshold) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> singular_values(const RealMatrix& a) {
    auto eig = symmetric_eigenvalues(gram(a));
    std::vector<double> sv(eig.size());
    for (std::size_t i = 0; i < eig.size(); ++i) sv[i] = std::sqrt(std::max(0.0, eig[eig.size() - 1 - i]));
    return sv;
}

double sigma_max(const RealMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return singular_values(a).front();
}

double sigma_min_psd(const RealMatrix& a) {
    const auto eig = symmetric_eigenvalues(a);
    double m = std::abs(eig.front());
    for (double e : eig) m = std::min(m, std::abs(e));
    return m;
}

}  // namespace hcs
