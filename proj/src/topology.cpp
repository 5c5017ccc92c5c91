#include "hdrelay/topology.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hdrelay {

std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

const char* to_string(NetworkKind kind) {
    return kind == NetworkKind::Line ? "line" : "diamond";
}

Network Network::line(std::vector<std::int64_t> caps) {
    if (caps.size() < 2)
        throw std::invalid_argument("line network needs at least 2 links (N >= 1 relay)");
    for (auto c : caps)
        if (c <= 0)
            throw std::invalid_argument("link capacities must be positive integers");
    Network net;
    net.kind_ = NetworkKind::Line;
    net.line_ = std::move(caps);
    return net;
}

Network Network::diamond(std::vector<PathCaps> paths) {
    if (paths.empty())
        throw std::invalid_argument("diamond network needs at least 1 relay path");
    for (const auto& p : paths)
        if (p.first <= 0 || p.second <= 0)
            throw std::invalid_argument("link capacities must be positive integers");
    Network net;
    net.kind_ = NetworkKind::Diamond;
    net.paths_ = std::move(paths);
    return net;
}

std::size_t Network::relay_count() const {
    return is_line() ? line_.size() - 1 : paths_.size();
}

std::size_t Network::link_count() const {
    return is_line() ? line_.size() : 2 * paths_.size();
}

std::int64_t Network::link_capacity(std::size_t link) const {
    if (link >= link_count())
        throw std::out_of_range("link index out of range");
    if (is_line())
        return line_[link];
    const auto& p = paths_[link / 2];
    return link % 2 == 0 ? p.first : p.second;
}

std::size_t Network::link_tail(std::size_t link) const {
    if (link >= link_count())
        throw std::out_of_range("link index out of range");
    if (is_line())
        return link;
    return link % 2 == 0 ? 0 : link / 2 + 1;
}

std::size_t Network::link_head(std::size_t link) const {
    if (link >= link_count())
        throw std::out_of_range("link index out of range");
    if (is_line())
        return link + 1;
    return link % 2 == 0 ? link / 2 + 1 : destination();
}

const std::vector<std::int64_t>& Network::line_caps() const {
    if (!is_line())
        throw std::logic_error("not a line network");
    return line_;
}

const std::vector<PathCaps>& Network::paths() const {
    if (!is_diamond())
        throw std::logic_error("not a diamond network");
    return paths_;
}

std::ostream& operator<<(std::ostream& os, const Network& net) {
    os << to_string(net.kind()) << "(";
    if (net.is_line()) {
        for (std::size_t i = 0; i < net.line_caps().size(); ++i)
            os << (i ? "," : "") << net.line_caps()[i];
    } else {
        for (std::size_t i = 0; i < net.paths().size(); ++i)
            os << (i ? "," : "") << "(" << net.paths()[i].first << "," << net.paths()[i].second << ")";
    }
    return os << ")";
}

double link_capacity_from_gain(double gain_squared) {
    if (!(gain_squared >= 0.0))
        throw std::invalid_argument("channel gain must be nonnegative");
    return std::log2(1.0 + gain_squared);
}

Rational path_capacity(std::int64_t first, std::int64_t second) {
    if (first <= 0 || second <= 0)
        throw std::invalid_argument("path capacities must be positive");
    return Rational(first * second, first + second);
}

CapacityResult capacity_line(const Network& net) {
    const auto& caps = net.line_caps();
    CapacityResult out;
    out.capacity = path_capacity(caps[0], caps[1]);
    for (std::size_t i = 1; i + 1 < caps.size(); ++i)
        out.capacity = std::min(out.capacity, path_capacity(caps[i], caps[i + 1]));
    return out;
}

namespace {

// Solves a square system exactly; nullopt when singular.
std::optional<std::vector<Rational>> solve_exact(std::vector<std::vector<Rational>> a,
                                                 std::vector<Rational> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col].numerator() == 0)
            ++pivot;
        if (pivot == n)
            return std::nullopt;
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col].numerator() == 0)
                continue;
            const Rational f = a[row][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k)
                a[row][k] -= f * a[col][k];
            b[row] -= f * b[col];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        b[i] /= a[i][i];
    return b;
}

struct Candidate {
    Rational value;
    std::vector<Rational> x;
    std::size_t support = 0;
};

// True when `a` should replace `b` as the incumbent optimum.
bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value)
        return a.value > b.value;
    if (a.support != b.support)
        return a.support < b.support;
    return std::lexicographical_compare(b.x.begin(), b.x.end(), a.x.begin(), a.x.end());
}

// Visits every k-subset of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    if (k > n)
        return;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

CapacityResult capacity_diamond(const Network& net) {
    const auto& paths = net.paths();
    const std::size_t n = paths.size();

    std::vector<Rational> cp(n), load1(n), load2(n);
    for (std::size_t p = 0; p < n; ++p) {
        cp[p] = path_capacity(paths[p].first, paths[p].second);
        load1[p] = cp[p] / paths[p].first;
        load2[p] = cp[p] / paths[p].second;
    }

    Candidate best;
    best.x.assign(n, Rational(0));

    const std::size_t max_support = std::min<std::size_t>(3, n);
    for (std::size_t k = 1; k <= max_support; ++k) {
        for_each_subset(n, k, [&](const std::vector<std::size_t>& support) {
            // Rows: x_s >= 0 (k), x_s <= 1 (k), load1.x <= 1, load2.x <= 1,
            // each written as coeff.x <= rhs; a vertex makes k of them tight.
            std::vector<std::vector<Rational>> rows;
            std::vector<Rational> rhs;
            for (std::size_t s = 0; s < k; ++s) {
                std::vector<Rational> lo(k, Rational(0)), hi(k, Rational(0));
                lo[s] = -1;
                hi[s] = 1;
                rows.push_back(lo);
                rhs.emplace_back(0);
                rows.push_back(hi);
                rhs.emplace_back(1);
            }
            std::vector<Rational> r1(k), r2(k);
            for (std::size_t s = 0; s < k; ++s) {
                r1[s] = load1[support[s]];
                r2[s] = load2[support[s]];
            }
            rows.push_back(r1);
            rhs.emplace_back(1);
            rows.push_back(r2);
            rhs.emplace_back(1);

            for_each_subset(rows.size(), k, [&](const std::vector<std::size_t>& tight) {
                std::vector<std::vector<Rational>> a;
                std::vector<Rational> b;
                for (auto t : tight) {
                    a.push_back(rows[t]);
                    b.push_back(rhs[t]);
                }
                auto sol = solve_exact(std::move(a), std::move(b));
                if (!sol)
                    return;
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    Rational lhs(0);
                    for (std::size_t s = 0; s < k; ++s)
                        lhs += rows[r][s] * (*sol)[s];
                    if (lhs > rhs[r])
                        return;
                }
                Candidate c;
                c.x.assign(n, Rational(0));
                for (std::size_t s = 0; s < k; ++s) {
                    c.x[support[s]] = (*sol)[s];
                    c.value += (*sol)[s] * cp[support[s]];
                    if ((*sol)[s].numerator() != 0)
                        ++c.support;
                }
                if (better(c, best))
                    best = std::move(c);
            });
        });
    }

    CapacityResult out;
    out.capacity = best.value;
    out.path_fractions = std::move(best.x);
    out.path_capacities = std::move(cp);
    return out;
}

CapacityResult capacity(const Network& net) {
    return net.is_line() ? capacity_line(net) : capacity_diamond(net);
}

std::string format_capacity(const CapacityResult& result, NetworkKind kind) {
    std::ostringstream os;
    os << "capacity=" << to_string(result.capacity);
    if (kind == NetworkKind::Diamond) {
        os << " x=";
        for (std::size_t i = 0; i < result.path_fractions.size(); ++i)
            os << (i ? "," : "") << to_string(result.path_fractions[i]);
    }
    return os.str();
}

}  // namespace hdrelay
