#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace logmajor {

/// Dense square complex matrix, row-major. Models an element of M_n.
template <typename Real>
class BasicMatrix {
public:
    using real_type = Real;
    using value_type = std::complex<Real>;

    BasicMatrix() = default;

    explicit BasicMatrix(std::size_t n) : n_(n), data_(n * n) {
        if (n == 0) throw DimensionMismatch("matrix dimension must be >= 1");
    }

    /// Row-major initializer; size must be a perfect square.
    BasicMatrix(std::initializer_list<std::initializer_list<value_type>> rows)
        : BasicMatrix(rows.size()) {
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != n_) throw DimensionMismatch("ragged matrix initializer");
            std::size_t j = 0;
            for (const auto& v : row) (*this)(i, j++) = v;
            ++i;
        }
    }

    static BasicMatrix zero(std::size_t n) { return BasicMatrix(n); }

    static BasicMatrix identity(std::size_t n) {
        BasicMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1);
        return m;
    }

    static BasicMatrix diagonal(std::span<const Real> d) {
        BasicMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static BasicMatrix diagonal(std::initializer_list<Real> d) {
        std::vector<Real> v(d);
        return diagonal(std::span<const Real>(v));
    }

    template <typename Other>
    static BasicMatrix convert(const BasicMatrix<Other>& other) {
        BasicMatrix m(other.size());
        for (std::size_t i = 0; i < other.size(); ++i)
            for (std::size_t j = 0; j < other.size(); ++j)
                m(i, j) = value_type(static_cast<Real>(other(i, j).real()),
                                     static_cast<Real>(other(i, j).imag()));
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    bool empty() const noexcept { return n_ == 0; }

    value_type& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const value_type& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<value_type> data() noexcept { return data_; }
    std::span<const value_type> data() const noexcept { return data_; }

    BasicMatrix adjoint() const {
        BasicMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    /// (x + x*) / 2; used to remove rounding asymmetry from products known to be Hermitian.
    BasicMatrix hermitian_part() const {
        BasicMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                m(i, j) = ((*this)(i, j) + std::conj((*this)(j, i))) * Real(0.5);
        return m;
    }

    value_type trace() const {
        value_type t{};
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    Real frobenius_norm() const {
        Real s = 0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    Real max_abs() const {
        Real m = 0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const value_type& v) {
            return std::isfinite(v.real()) && std::isfinite(v.imag());
        });
    }

    BasicMatrix& operator+=(const BasicMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    BasicMatrix& operator-=(const BasicMatrix& o) {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    BasicMatrix& operator*=(value_type s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend BasicMatrix operator+(BasicMatrix a, const BasicMatrix& b) { return a += b; }
    friend BasicMatrix operator-(BasicMatrix a, const BasicMatrix& b) { return a -= b; }
    friend BasicMatrix operator*(BasicMatrix a, value_type s) { return a *= s; }
    friend BasicMatrix operator*(value_type s, BasicMatrix a) { return a *= s; }
    friend BasicMatrix operator-(BasicMatrix a) { return a *= value_type(-1); }

    friend BasicMatrix operator*(const BasicMatrix& a, const BasicMatrix& b) {
        a.check_same(b);
        const std::size_t n = a.n_;
        BasicMatrix c(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const value_type aik = a(i, k);
                if (aik == value_type{}) continue;
                for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend bool operator==(const BasicMatrix& a, const BasicMatrix& b) {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

private:
    void check_same(const BasicMatrix& o) const {
        if (o.n_ != n_)
            throw DimensionMismatch("dimension mismatch: " + std::to_string(n_) + " vs " +
                                    std::to_string(o.n_));
    }

    std::size_t n_ = 0;
    std::vector<value_type> data_;
};

using ComplexMatrix = BasicMatrix<double>;
using Complex = std::complex<double>;

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Whitespace tokenizer with line/column tracking and `#` comments.
class TextReader {
public:
    struct Token {
        std::string_view text;
        int line;
        int column;
    };

    explicit TextReader(std::string_view text) : text_(text) {}

    bool at_end() {
        skip();
        return pos_ >= text_.size();
    }

    Token peek() {
        skip();
        const std::size_t save_pos = pos_;
        const int save_line = line_, save_col = col_;
        Token t = next_raw();
        pos_ = save_pos;
        line_ = save_line;
        col_ = save_col;
        return t;
    }

    Token next() {
        skip();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
        return next_raw();
    }

    double next_double() {
        Token t = next();
        double v = 0;
        if (t.text == "inf") return HUGE_VAL;
        if (t.text == "-inf") return -HUGE_VAL;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
            throw ParseError("expected a number, got '" + std::string(t.text) + "'", t.line,
                             t.column);
        return v;
    }

    long long next_integer() {
        Token t = next();
        long long v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
            throw ParseError("expected an integer, got '" + std::string(t.text) + "'", t.line,
                             t.column);
        return v;
    }

    void expect(std::string_view word) {
        Token t = next();
        if (t.text != word)
            throw ParseError("expected '" + std::string(word) + "', got '" +
                                 std::string(t.text) + "'",
                             t.line, t.column);
    }

private:
    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Token next_raw() {
        const std::size_t start = pos_;
        Token t{{}, line_, col_};
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
            advance();
        }
        t.text = text_.substr(start, pos_ - start);
        return t;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

/// Text record: `n` on its own line, then one line per row of `re im` pairs.
inline std::string to_text(const ComplexMatrix& x) {
    std::string out = std::to_string(x.size()) + "\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j) out += ' ';
            out += format_double(x(i, j).real());
            out += ' ';
            out += format_double(x(i, j).imag());
        }
        out += '\n';
    }
    return out;
}

inline ComplexMatrix read_matrix(TextReader& in) {
    const auto head = in.peek();
    const long long n = in.next_integer();
    if (n < 1 || n > 4096) throw ParseError("matrix dimension out of range", head.line, head.column);
    ComplexMatrix x(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            const auto tok = in.peek();
            const double re = in.next_double();
            const double im = in.next_double();
            if (!std::isfinite(re) || !std::isfinite(im))
                throw ParseError("matrix entries must be finite", tok.line, tok.column);
            x(i, j) = Complex(re, im);
        }
    return x;
}

inline ComplexMatrix parse_matrix(std::string_view text) {
    TextReader in(text);
    ComplexMatrix x = read_matrix(in);
    if (!in.at_end()) {
        const auto t = in.peek();
        throw ParseError("trailing content after matrix record", t.line, t.column);
    }
    return x;
}

} // namespace logmajor
