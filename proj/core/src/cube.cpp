#include "hslice/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hslice/parallel.hpp"

namespace hslice {

namespace {

void check_edge(EdgeId e, int n) {
    if (!edge_is_canonical(e, n)) throw std::invalid_argument("non-canonical edge id");
}

template <typename T>
SliceOutcome classify(const T& v0, const T& v1, bool z0, bool z1) {
    SliceOutcome out;
    if (z0 || z1) {
        out.kind = SliceOutcome::Kind::Degenerate;
        out.baseOnPlane = z0;
        out.otherOnPlane = z1;
        return out;
    }
    bool neg0 = v0 < 0, neg1 = v1 < 0;
    out.kind = neg0 != neg1 ? SliceOutcome::Kind::Sliced : SliceOutcome::Kind::NotSliced;
    return out;
}

// One hyperplane rescaled to integers: multiply (a, b) by the lcm of the
// denominators. Signs of <a,v> - b are invariant under positive row scaling,
// so all slicing decisions stay exact. When the largest possible partial sum
// fits comfortably in int64 we walk in machine words, otherwise in mpz.
struct ScaledExact {
    bool fits64 = false;
    std::vector<int64_t> two_a64;
    std::vector<mpz_class> a_z;  // scaled coefficients
    std::vector<mpz_class> two_az;
    mpz_class b_z;

    explicit ScaledExact(const ExactHyperplane& h) {
        mpz_class lcm_den = h.b.get_den();
        for (const auto& q : h.a) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), q.get_den().get_mpz_t());
        a_z.reserve(h.a.size());
        mpz_class reach = 0;  // |b| + sum |a_j| after scaling
        for (const auto& q : h.a) {
            mpz_class scaled = q.get_num() * (lcm_den / q.get_den());
            reach += abs(scaled);
            a_z.push_back(std::move(scaled));
        }
        b_z = h.b.get_num() * (lcm_den / h.b.get_den());
        reach += abs(b_z);
        // probes add one more 2|a_h| on top of a full sum
        fits64 = mpz_sizeinbase(reach.get_mpz_t(), 2) <= 60;
        two_az.reserve(a_z.size());
        for (const auto& z : a_z) two_az.push_back(2 * z);
        if (fits64) {
            two_a64.reserve(a_z.size());
            for (const auto& z : two_az) two_a64.push_back(static_cast<int64_t>(z.get_si()));
        }
    }

    int64_t value64_at(uint32_t bits) const {
        int64_t acc = -static_cast<int64_t>(b_z.get_si());
        for (size_t j = 0; j < a_z.size(); ++j) {
            int64_t aj = static_cast<int64_t>(a_z[j].get_si());
            acc += (bits >> j & 1u) ? aj : -aj;
        }
        return acc;
    }

    mpz_class value_z_at(uint32_t bits) const {
        mpz_class acc = -b_z;
        for (size_t j = 0; j < a_z.size(); ++j) {
            if (bits >> j & 1u)
                acc += a_z[j];
            else
                acc -= a_z[j];
        }
        return acc;
    }
};

struct Partial {
    uint64_t covered = 0;
    uint64_t degenerate = 0;
    uint64_t unslicedTotal = 0;
    std::vector<uint64_t> perHyp;
    std::vector<EdgeId> unsliced;
};

uint32_t gray(uint32_t i) { return i ^ (i >> 1); }

template <typename Walker>
Partial walk_block(uint64_t lo, uint64_t hi, int n, size_t k, uint64_t keep, Walker& walker) {
    Partial p;
    p.perHyp.assign(k, 0);
    walker.reset(gray(static_cast<uint32_t>(lo)));
    for (uint64_t i = lo; i < hi; ++i) {
        uint32_t v = gray(static_cast<uint32_t>(i));
        for (int h = 0; h < n; ++h) {
            if (v >> h & 1u) continue;
            bool any_sliced = false;
            for (size_t hp = 0; hp < k; ++hp) {
                SliceOutcome out = walker.probe(hp, h);
                if (out.kind == SliceOutcome::Kind::Sliced) {
                    ++p.perHyp[hp];
                    any_sliced = true;
                } else if (out.kind == SliceOutcome::Kind::Degenerate) {
                    ++p.degenerate;
                }
            }
            if (any_sliced) {
                ++p.covered;
            } else {
                ++p.unslicedTotal;
                if (p.unsliced.size() < keep) p.unsliced.push_back(EdgeId{v, static_cast<uint8_t>(h)});
            }
        }
        if (i + 1 < hi) walker.step(std::countr_zero(static_cast<uint32_t>(i) + 1));
    }
    return p;
}

// Gray-code walker over exact integer-scaled hyperplanes.
struct ExactWalker {
    const std::vector<ScaledExact>* hyps;
    uint32_t bits = 0;
    std::vector<int64_t> val64;
    std::vector<mpz_class> valz;
    mpz_class tmp;

    void reset(uint32_t start) {
        bits = start;
        val64.resize(hyps->size());
        valz.resize(hyps->size());
        for (size_t i = 0; i < hyps->size(); ++i) {
            const auto& s = (*hyps)[i];
            if (s.fits64)
                val64[i] = s.value64_at(start);
            else
                valz[i] = s.value_z_at(start);
        }
    }

    void step(int t) {
        bits ^= 1u << t;
        bool now_positive = bits >> t & 1u;
        for (size_t i = 0; i < hyps->size(); ++i) {
            const auto& s = (*hyps)[i];
            if (s.fits64)
                val64[i] += now_positive ? s.two_a64[t] : -s.two_a64[t];
            else if (now_positive)
                valz[i] += s.two_az[t];
            else
                valz[i] -= s.two_az[t];
        }
    }

    SliceOutcome probe(size_t i, int h) {
        const auto& s = (*hyps)[i];
        if (s.fits64) {
            int64_t v0 = val64[i];
            int64_t v1 = v0 + s.two_a64[h];
            return classify(v0, v1, v0 == 0, v1 == 0);
        }
        const mpz_class& v0 = valz[i];
        tmp = v0 + s.two_az[h];
        int s0 = sgn(v0), s1 = sgn(tmp);
        SliceOutcome out;
        if (s0 == 0 || s1 == 0) {
            out.kind = SliceOutcome::Kind::Degenerate;
            out.baseOnPlane = s0 == 0;
            out.otherOnPlane = s1 == 0;
        } else {
            out.kind = s0 != s1 ? SliceOutcome::Kind::Sliced : SliceOutcome::Kind::NotSliced;
        }
        return out;
    }
};

// Float walker: compensated (Kahan) running values so drift stays O(eps)
// over arbitrarily long walks, plus the scale-aware degeneracy tolerance.
struct FloatWalker {
    const FloatCollection* col;
    double epsFactor;
    uint32_t bits = 0;
    std::vector<double> val, comp, eps;
    std::vector<std::vector<double>> two_a;

    void prepare() {
        size_t k = col->hyperplanes.size();
        eps.resize(k);
        two_a.resize(k);
        for (size_t i = 0; i < k; ++i) {
            eps[i] = zero_tolerance(col->hyperplanes[i], epsFactor);
            two_a[i].resize(col->n);
            for (int j = 0; j < col->n; ++j) two_a[i][j] = 2.0 * col->hyperplanes[i].a[j];
        }
    }

    void reset(uint32_t start) {
        bits = start;
        size_t k = col->hyperplanes.size();
        val.assign(k, 0.0);
        comp.assign(k, 0.0);
        for (size_t i = 0; i < k; ++i) {
            const auto& h = col->hyperplanes[i];
            double acc = -h.b;
            for (int j = 0; j < col->n; ++j) acc += (start >> j & 1u) ? h.a[j] : -h.a[j];
            val[i] = acc;
        }
    }

    void kahan_add(size_t i, double x) {
        double y = x - comp[i];
        double t = val[i] + y;
        comp[i] = (t - val[i]) - y;
        val[i] = t;
    }

    void step(int t) {
        bits ^= 1u << t;
        bool now_positive = bits >> t & 1u;
        for (size_t i = 0; i < col->hyperplanes.size(); ++i)
            kahan_add(i, now_positive ? two_a[i][t] : -two_a[i][t]);
    }

    SliceOutcome probe(size_t i, int h) {
        double v0 = val[i] - comp[i];
        double v1 = v0 + two_a[i][h];
        return classify(v0, v1, std::fabs(v0) <= eps[i], std::fabs(v1) <= eps[i]);
    }
};

template <typename Walker>
CoverReport run_cover(int n, size_t k, const CoverOptions& opts, const Walker& proto) {
    uint64_t vertices = 1ull << n;
    constexpr uint64_t kBlock = 8192;  // fixed => deterministic for any worker count
    auto partials = map_blocks<Partial>(vertices, kBlock, opts.workers,
                                        [&](uint64_t lo, uint64_t hi, uint64_t) {
                                            Walker w = proto;
                                            return walk_block(lo, hi, n, k, opts.unslicedKeep, w);
                                        });
    CoverReport r;
    r.n = n;
    r.totalEdges = edge_count(n);
    r.perHyperplaneSliceCounts.assign(k, 0);
    for (const auto& p : partials) {
        r.slicedEdges += p.covered;
        r.degenerateIncidences += p.degenerate;
        r.unslicedCount += p.unslicedTotal;
        for (size_t i = 0; i < k; ++i) r.perHyperplaneSliceCounts[i] += p.perHyp[i];
        for (const auto& e : p.unsliced) {
            if (r.unsliced.size() >= opts.unslicedKeep) break;
            r.unsliced.push_back(e);
        }
    }
    std::sort(r.unsliced.begin(), r.unsliced.end(), [](EdgeId a, EdgeId b) {
        return a.base != b.base ? a.base < b.base : a.flip < b.flip;
    });
    return r;
}

}  // namespace

SliceOutcome slices_edge(const ExactHyperplane& h, EdgeId e, int n) {
    check_edge(e, n);
    Rational v0 = evaluate(h, e.base, n);
    Rational v1 = evaluate(h, e.other(), n);
    int s0 = sgn(v0), s1 = sgn(v1);
    SliceOutcome out;
    if (s0 == 0 || s1 == 0) {
        out.kind = SliceOutcome::Kind::Degenerate;
        out.baseOnPlane = s0 == 0;
        out.otherOnPlane = s1 == 0;
    } else {
        out.kind = s0 != s1 ? SliceOutcome::Kind::Sliced : SliceOutcome::Kind::NotSliced;
    }
    return out;
}

SliceOutcome slices_edge(const FloatHyperplane& h, EdgeId e, int n, double epsFactor) {
    check_edge(e, n);
    double v0 = evaluate(h, e.base, n);
    double v1 = evaluate(h, e.other(), n);
    double eps = zero_tolerance(h, epsFactor);
    return classify(v0, v1, std::fabs(v0) <= eps, std::fabs(v1) <= eps);
}

CoverReport verify_cover(const AnyCollection& collection, const CoverOptions& opts) {
    validate_collection(collection);
    int n = dim_of(collection);
    if (n > opts.cap)
        throw CapExceeded("dimension " + std::to_string(n) + " exceeds enumeration cap " +
                          std::to_string(opts.cap));
    if (n > 31) throw CapExceeded("dimension " + std::to_string(n) + " exceeds the 31-bit vertex mask");

    if (const auto* ex = std::get_if<ExactCollection>(&collection)) {
        std::vector<ScaledExact> scaled;
        scaled.reserve(ex->hyperplanes.size());
        for (const auto& h : ex->hyperplanes) scaled.emplace_back(h);
        ExactWalker proto;
        proto.hyps = &scaled;
        return run_cover(n, scaled.size(), opts, proto);
    }
    const auto& fl = std::get<FloatCollection>(collection);
    FloatWalker proto;
    proto.col = &fl;
    proto.epsFactor = opts.epsZeroFactor;
    proto.prepare();
    return run_cover(n, fl.hyperplanes.size(), opts, proto);
}

std::string edge_to_string(EdgeId e) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08x:%u", e.base, static_cast<unsigned>(e.flip));
    return buf;
}

std::vector<uint8_t> edge_outcome_codes(const ExactHyperplane& h, int n) {
    if (n < 1 || n > 28) throw std::invalid_argument("edge_outcome_codes: bad dimension");
    if (static_cast<int>(h.a.size()) != n) throw std::invalid_argument("hyperplane dimension mismatch");
    ScaledExact s(h);
    std::vector<uint8_t> codes;
    codes.reserve(edge_count(n));
    uint32_t vertices = 1u << n;

    auto code_of = [](int s0, int s1) -> uint8_t {
        if (s0 == 0 || s1 == 0) return 2;
        return s0 != s1 ? 1 : 0;
    };

    if (s.fits64) {
        for (uint32_t v = 0; v < vertices; ++v) {
            int64_t val = s.value64_at(v);
            for (int t = 0; t < n; ++t) {
                if (v >> t & 1u) continue;
                int64_t v1 = val + s.two_a64[t];
                codes.push_back(code_of(val == 0 ? 0 : (val < 0 ? -1 : 1), v1 == 0 ? 0 : (v1 < 0 ? -1 : 1)));
            }
        }
        return codes;
    }

    // mpz path: plain-order walk, incremental over the xor-diff bits
    mpz_class val = s.value_z_at(0), v1;
    for (uint32_t v = 0;; ++v) {
        for (int t = 0; t < n; ++t) {
            if (v >> t & 1u) continue;
            v1 = val + s.two_az[t];
            codes.push_back(code_of(sgn(val), sgn(v1)));
        }
        if (v + 1 == vertices) break;
        uint32_t diff = v ^ (v + 1);
        uint32_t next = v + 1;
        while (diff) {
            int t = std::countr_zero(diff);
            diff &= diff - 1;
            if (next >> t & 1u)
                val += s.two_az[t];
            else
                val -= s.two_az[t];
        }
    }
    return codes;
}

}  // namespace hslice
