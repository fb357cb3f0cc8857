#include "bgwtilt/model.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace bgwtilt {

Integer factorial(unsigned n) {
    Integer r = 1;
    for (unsigned i = 2; i <= n; ++i) r *= i;
    return r;
}

Rational parse_rational(const std::string& text) {
    std::string s = text;
    // strip surrounding whitespace
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw ParseError("empty number");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        try {
            Integer num(s.substr(0, slash));
            Integer den(s.substr(slash + 1));
            if (den == 0) throw ParseError("zero denominator in '" + text + "'");
            return Rational(num, den);
        } catch (const std::runtime_error&) {
            throw ParseError("bad rational '" + text + "'");
        }
    }

    // decimal / scientific
    bool neg = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
    std::string digits;
    long long frac_len = 0, exponent = 0;
    bool seen_digit = false, seen_dot = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac_len;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else if ((c == 'e' || c == 'E') && seen_digit) {
            try {
                exponent = std::stoll(s.substr(pos + 1));
            } catch (const std::exception&) {
                throw ParseError("bad exponent in '" + text + "'");
            }
            break;
        } else {
            throw ParseError("bad number '" + text + "'");
        }
    }
    if (!seen_digit) throw ParseError("bad number '" + text + "'");
    Integer mantissa(digits.empty() ? "0" : digits);
    if (neg) mantissa = -mantissa;
    long long p10 = exponent - frac_len;
    Rational r(mantissa, 1);
    Integer scale = 1;
    for (long long i = 0; i < std::llabs(p10); ++i) scale *= 10;
    if (p10 >= 0)
        r *= Rational(scale, 1);
    else
        r /= Rational(scale, 1);
    return r;
}

std::string format_rational(const Rational& q) {
    std::string num = numerator(q).str();
    if (denominator(q) == 1) return num;
    return num + "/" + denominator(q).str();
}

std::vector<Word> distinct_orderings(const MultiIndex& k) {
    std::vector<Word> out;
    unsigned total = 0;
    for (unsigned v : k) total += v;
    Word current;
    current.reserve(total);
    MultiIndex left = k;
    auto rec = [&](auto&& self) -> void {
        if (current.size() == total) {
            out.push_back(current);
            return;
        }
        for (std::size_t j = 0; j < left.size(); ++j) {
            if (left[j] == 0) continue;
            --left[j];
            current.push_back(static_cast<int>(j));
            self(self);
            current.pop_back();
            ++left[j];
        }
    };
    rec(rec);
    return out;
}

QModel to_quad_model(const RModel& m, long long d) {
    return convert_model<Quad, Rational>(
        m, [d](const Rational& r) { return Quad{r, Rational(0), d}; });
}

namespace {

double poly_eval(const Pgf<double>& g, std::span<const double> x) {
    double acc = 0;
    for (const auto& [k, c] : g.terms) {
        double term = c;
        for (std::size_t j = 0; j < k.size(); ++j)
            if (k[j] > 0) term *= ipow(x[j], k[j]);
        acc += term;
    }
    return acc;
}

double poly_partial(const Pgf<double>& g, int j, std::span<const double> x) {
    double acc = 0;
    const auto ju = static_cast<std::size_t>(j);
    for (const auto& [k, c] : g.terms) {
        if (k[ju] == 0) continue;
        double term = c * k[ju];
        for (std::size_t l = 0; l < k.size(); ++l) {
            unsigned e = k[l] - (l == ju ? 1u : 0u);
            if (e > 0) term *= ipow(x[l], e);
        }
        acc += term;
    }
    return acc;
}

double poly_at_one(const Pgf<double>& g) {
    double acc = 0;
    for (const auto& [k, c] : g.terms) acc += c;
    return acc;
}

} // namespace

double eval_pgf(const DModel& m, int type, std::span<const double> x) {
    const auto& g = m.pgf.at(static_cast<std::size_t>(type));
    if (g.kind == PgfKind::polynomial) {
        double v = poly_eval(g, x);
        if (!std::isfinite(v)) throw EvalOverflow("pgf value out of range");
        return v;
    }
    double e = poly_eval(g, x) - poly_at_one(g);
    if (!std::isfinite(e) || e > 709.0) throw EvalOverflow("pgf exponent out of range");
    return std::exp(e);
}

std::vector<double> eval_pgf_gradient(const DModel& m, int type, std::span<const double> x) {
    const auto& g = m.pgf.at(static_cast<std::size_t>(type));
    std::vector<double> grad(static_cast<std::size_t>(m.num_types), 0.0);
    if (g.kind == PgfKind::polynomial) {
        for (int j = 0; j < m.num_types; ++j) {
            grad[static_cast<std::size_t>(j)] = poly_partial(g, j, x);
            if (!std::isfinite(grad[static_cast<std::size_t>(j)]))
                throw EvalOverflow("pgf gradient out of range");
        }
        return grad;
    }
    double phi = eval_pgf(m, type, x);
    for (int j = 0; j < m.num_types; ++j) {
        grad[static_cast<std::size_t>(j)] = phi * poly_partial(g, j, x);
        if (!std::isfinite(grad[static_cast<std::size_t>(j)]))
            throw EvalOverflow("pgf gradient out of range");
    }
    return grad;
}

namespace {

// mu(k) of a compound Poisson: independent N_a ~ Poisson(c_a) per nonconstant
// monomial a of f, offspring counts sum_a N_a * a.
double exp_poly_mass(const std::vector<std::pair<MultiIndex, double>>& terms,
                     const MultiIndex& target) {
    std::vector<std::pair<MultiIndex, double>> monos;
    double lambda_total = 0;
    for (const auto& [a, c] : terms) {
        if (weight_of(a) == 0 || c == 0) continue;
        monos.emplace_back(a, c);
        lambda_total += c;
    }
    double acc = 0;
    MultiIndex rem = target;
    auto rec = [&](auto&& self, std::size_t t, double partial) -> void {
        if (t == monos.size()) {
            if (weight_of(rem) == 0) acc += partial;
            return;
        }
        const auto& [a, c] = monos[t];
        // n copies of monomial a must fit inside rem
        unsigned max_n = std::numeric_limits<unsigned>::max();
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[j] > 0) max_n = std::min(max_n, rem[j] / a[j]);
        double pois = 1.0; // c^n / n!
        for (unsigned n = 0; n <= max_n; ++n) {
            if (n > 0) {
                pois *= c / n;
                for (std::size_t j = 0; j < a.size(); ++j) rem[j] -= a[j];
            }
            self(self, t + 1, partial * pois);
        }
        for (std::size_t j = 0; j < a.size(); ++j) rem[j] += a[j] * max_n;
    };
    rec(rec, 0, 1.0);
    return acc * std::exp(-lambda_total);
}

} // namespace

double projection_mass(const DModel& m, int type, const MultiIndex& k) {
    const auto& g = m.pgf.at(static_cast<std::size_t>(type));
    if (g.kind == PgfKind::polynomial) {
        for (const auto& [idx, c] : g.terms)
            if (idx == k) return c;
        return 0.0;
    }
    return exp_poly_mass(g.terms, k);
}

std::vector<std::vector<double>> mean_matrix(const DModel& m) {
    std::vector<double> ones(static_cast<std::size_t>(m.num_types), 1.0);
    std::vector<std::vector<double>> mm;
    mm.reserve(static_cast<std::size_t>(m.num_types));
    for (int i = 0; i < m.num_types; ++i) mm.push_back(eval_pgf_gradient(m, i, ones));
    return mm;
}

} // namespace bgwtilt
