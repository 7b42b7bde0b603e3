#include "hslice/wiggle.hpp"

#include <map>
#include <string>

#include "hslice/cube.hpp"
#include "hslice/rng.hpp"

namespace hslice {

namespace {

// eps * 2^-r, sign chosen by the attempt's deterministic schedule
Rational dyadic_step(const Rational& eps, unsigned r, int sign) {
    Rational d = eps / Rational(mpz_class(1) << r);
    return sign < 0 ? Rational(-d) : d;
}

struct Scheduler {
    uint64_t state;
    bool all_plus;
    explicit Scheduler(int attempt) : state(0x5bf03635 + attempt), all_plus(attempt == 0) {}
    int next_sign() {
        if (all_plus) return 1;
        return (splitmix64(state) >> 32 & 1u) ? 1 : -1;
    }
};

// one perturbation pass; returns number of coefficients touched
uint64_t perturb_pass(ExactCollection& c, const Rational& eps, unsigned& r, Scheduler& sched) {
    std::map<Rational, int> seen;  // |value| -> occurrences so far
    uint64_t touched = 0;
    for (auto& h : c.hyperplanes) {
        for (auto& aj : h.a) {
            Rational key = abs(aj);
            bool need = sgn(aj) == 0 || seen.count(key) > 0;
            if (!need) {
                seen.emplace(std::move(key), 1);
                continue;
            }
            Rational step = dyadic_step(eps, r++, sched.next_sign());
            if (sgn(aj) == 0)
                aj = step;
            else
                aj += step;
            ++touched;
            seen.emplace(abs(aj), 1);  // best effort; a later full rescan re-validates
        }
    }
    return touched;
}

}  // namespace

bool is_generic(const ExactCollection& collection) {
    std::map<Rational, int> seen;
    for (const auto& h : collection.hyperplanes)
        for (const auto& aj : h.a) {
            if (sgn(aj) == 0) return false;
            if (!seen.emplace(abs(aj), 1).second) return false;
        }
    return true;
}

WiggleResult wiggle(const ExactCollection& collection, const WiggleOptions& opts) {
    AnyCollection any{collection};
    validate_collection(any);
    if (sgn(opts.magnitude) <= 0) throw std::invalid_argument("wiggle magnitude must be positive");
    int n = collection.n;

    WiggleResult result;
    result.collection = collection;
    if (is_generic(collection)) return result;  // nothing to do, nothing to certify

    if (opts.certify && n > opts.cap)
        throw CapExceeded("wiggle certification needs full enumeration; dimension " +
                          std::to_string(n) + " exceeds cap " + std::to_string(opts.cap));
    if (opts.certify && n > 31)
        throw CapExceeded("dimension " + std::to_string(n) + " exceeds the 31-bit vertex mask");

    std::vector<std::vector<uint8_t>> before;
    if (opts.certify) {
        before.reserve(collection.hyperplanes.size());
        for (const auto& h : collection.hyperplanes) before.push_back(edge_outcome_codes(h, n));
    }

    std::string lastFailure = "perturbation never became generic";
    for (int attempt = 0; attempt < opts.maxAttempts; ++attempt) {
        Rational eps = opts.magnitude / Rational(mpz_class(1) << (2 * attempt));
        Scheduler sched(attempt);
        ExactCollection cand = collection;
        unsigned r = 0;
        uint64_t touched = 0;
        for (int pass = 0; pass < 4 && !is_generic(cand); ++pass)
            touched += perturb_pass(cand, eps, r, sched);
        if (!is_generic(cand)) continue;

        if (!opts.certify) {
            result.collection = std::move(cand);
            result.perturbedCoefficients = touched;
            result.attemptsUsed = attempt + 1;
            result.changed = true;
            return result;
        }

        bool ok = true;
        uint64_t degBefore = 0, degAfter = 0, resolved = 0;
        for (size_t i = 0; i < cand.hyperplanes.size() && ok; ++i) {
            auto after = edge_outcome_codes(cand.hyperplanes[i], n);
            for (size_t e = 0; e < after.size(); ++e) {
                uint8_t was = before[i][e], now = after[e];
                if (was == 2) ++degBefore;
                if (now == 2) ++degAfter;
                if (was == now) continue;
                if (was == 2 && now == 0) {
                    ++resolved;
                    continue;
                }
                // sliced-edge set changed (including Degenerate -> Sliced)
                lastFailure = "hyperplane " + std::to_string(i) + ", edge index " +
                              std::to_string(e) + ": outcome " + std::to_string(was) + " -> " +
                              std::to_string(now);
                ok = false;
                break;
            }
        }
        if (!ok) continue;

        result.collection = std::move(cand);
        result.perturbedCoefficients = touched;
        result.degenerateBefore = degBefore;
        result.degenerateAfter = degAfter;
        result.resolvedDegenerate = resolved;
        result.attemptsUsed = attempt + 1;
        result.changed = true;
        return result;
    }

    throw WiggleError("wiggle could not certify sliced-set preservation within " +
                      std::to_string(opts.maxAttempts) + " attempts (" + lastFailure + ")");
}

}  // namespace hslice
