#include "ftk/dist.hpp"

#include <algorithm>
#include <stdexcept>

namespace ftk {

Dist::Dist(std::vector<std::pair<uint64_t, Rat>> atoms) : atoms_(std::move(atoms)) {
    std::sort(atoms_.begin(), atoms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // merge duplicate states
    std::vector<std::pair<uint64_t, Rat>> merged;
    for (auto& [s, w] : atoms_) {
        if (!merged.empty() && merged.back().first == s) merged.back().second += w;
        else merged.emplace_back(s, w);
    }
    std::erase_if(merged, [](const auto& a) { return a.second == 0; });
    atoms_ = std::move(merged);
}

Dist Dist::uniform(const std::vector<uint64_t>& states) {
    if (states.empty()) throw std::invalid_argument("uniform on empty support");
    Rat w(1, (unsigned long)states.size());
    std::vector<std::pair<uint64_t, Rat>> atoms;
    atoms.reserve(states.size());
    for (uint64_t s : states) atoms.emplace_back(s, w);
    return Dist(std::move(atoms));
}

Dist Dist::point(uint64_t state) {
    return Dist({{state, Rat(1)}});
}

Rat Dist::mass(uint64_t state) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), state,
                               [](const auto& a, uint64_t s) { return a.first < s; });
    if (it != atoms_.end() && it->first == state) return it->second;
    return Rat(0);
}

bool Dist::is_probability() const {
    Rat total(0);
    for (const auto& [s, w] : atoms_) {
        if (w <= 0) return false;
        total += w;
    }
    return total == 1;
}

Rat overlap(const Dist& a, const Dist& b) {
    Rat s(0);
    auto ia = a.atoms().begin(), ib = b.atoms().begin();
    while (ia != a.atoms().end() && ib != b.atoms().end()) {
        if (ia->first < ib->first) ++ia;
        else if (ib->first < ia->first) ++ib;
        else {
            s += std::min(ia->second, ib->second);
            ++ia;
            ++ib;
        }
    }
    return s;
}

Rat tv(const Dist& a, const Dist& b) {
    // (1/2) sum |a - b|; equals 1 - overlap for probability measures
    Rat s(0);
    auto ia = a.atoms().begin(), ib = b.atoms().begin();
    while (ia != a.atoms().end() || ib != b.atoms().end()) {
        if (ib == b.atoms().end() || (ia != a.atoms().end() && ia->first < ib->first)) {
            s += abs(ia->second);
            ++ia;
        } else if (ia == a.atoms().end() || ib->first < ia->first) {
            s += abs(ib->second);
            ++ib;
        } else {
            s += abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return s / 2;
}

Rat kr_distance(const Dist& a, const Dist& b,
                const std::function<Rat(uint64_t, uint64_t)>& ground_metric) {
    const auto& sa = a.atoms();
    const auto& sb = b.atoms();
    if (sa.empty() || sb.empty()) throw std::invalid_argument("kr_distance of empty measure");

    // scale masses to integers
    Int mass_lcm = 1;
    for (const auto& [s, w] : sa) mpz_lcm(mass_lcm.get_mpz_t(), mass_lcm.get_mpz_t(), w.get_den().get_mpz_t());
    for (const auto& [s, w] : sb) mpz_lcm(mass_lcm.get_mpz_t(), mass_lcm.get_mpz_t(), w.get_den().get_mpz_t());

    std::vector<int64_t> supply, demand;
    for (const auto& [s, w] : sa) {
        Rat v = w * mass_lcm;
        if (!v.get_num().fits_slong_p()) throw std::overflow_error("transport supply too large");
        supply.push_back(v.get_num().get_si());
    }
    for (const auto& [s, w] : sb) {
        Rat v = w * mass_lcm;
        if (!v.get_num().fits_slong_p()) throw std::overflow_error("transport demand too large");
        demand.push_back(v.get_num().get_si());
    }

    // scale costs to integers
    std::vector<Rat> cost_q(sa.size() * sb.size());
    Int cost_lcm = 1;
    for (size_t i = 0; i < sa.size(); ++i)
        for (size_t j = 0; j < sb.size(); ++j) {
            Rat c = ground_metric(sa[i].first, sb[j].first);
            if (c < 0) throw std::invalid_argument("negative ground metric");
            mpz_lcm(cost_lcm.get_mpz_t(), cost_lcm.get_mpz_t(), c.get_den().get_mpz_t());
            cost_q[i * sb.size() + j] = std::move(c);
        }
    std::vector<int64_t> cost(cost_q.size());
    for (size_t k = 0; k < cost_q.size(); ++k) {
        Rat v = cost_q[k] * cost_lcm;
        if (!v.get_num().fits_slong_p()) throw std::overflow_error("transport cost too large");
        cost[k] = v.get_num().get_si();
    }

    Int obj = transport_min_cost(supply, demand, cost);
    Rat r(obj);
    r /= Rat(mass_lcm * cost_lcm);
    r.canonicalize();
    return r;
}

} // namespace ftk
