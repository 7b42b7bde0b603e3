#include "hslice/decompose.hpp"

#include <algorithm>
#include <cmath>

namespace hslice {

DecompConstants DecompConstants::paper(int k, int n) {
    if (n < 2 || k < 1) throw std::invalid_argument("decomposition needs k >= 1, n >= 2");
    DecompConstants c;
    c.S = static_cast<int>(std::ceil(250.0 * std::log(n)));
    c.W = 1e4 * std::sqrt(static_cast<double>(k) * std::log(n) / n);
    c.tau = 1.0 / 10001.0;
    c.paperDefaults = true;
    c.validate();
    return c;
}

DecompConstants DecompConstants::with_overrides(int k, int n, std::optional<int> S,
                                                std::optional<double> W,
                                                std::optional<double> tau) {
    DecompConstants c = paper(k, n);
    if (S) c.S = *S;
    if (W) c.W = *W;
    if (tau) c.tau = *tau;
    c.paperDefaults = !(S || W || tau);
    c.validate();
    return c;
}

void DecompConstants::validate() const {
    if (S < 1) throw std::invalid_argument("constants: S must be >= 1");
    if (!(W > 0.0) || !std::isfinite(W)) throw std::invalid_argument("constants: W must be positive");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("constants: tau must be in (0,1)");
}

namespace {

double row_sq_on(const Matrix& m, int row, const std::vector<char>& inN1) {
    const double* r = m.row(row);
    double acc = 0.0;
    for (int j = 0; j < m.cols; ++j)
        if (inN1[j]) acc += r[j] * r[j];
    return acc;
}

void rescale_row(Matrix& m, int row, double factor, int rowIdxForError) {
    if (!std::isfinite(factor) || factor <= 0.0)
        throw DecompError("rescaling overflow at row " + std::to_string(rowIdxForError));
    double* r = m.row(row);
    for (int j = 0; j < m.cols; ++j) {
        r[j] *= factor;
        if (!std::isfinite(r[j]))
            throw DecompError("rescaling overflow at row " + std::to_string(rowIdxForError));
    }
}

}  // namespace

DecompositionResult decompose(const Matrix& A, const DecompConstants& constants) {
    constants.validate();
    int k = A.rows, n = A.cols;
    if (k < 1 || n < 2) throw std::invalid_argument("decompose needs k >= 1, n >= 2");
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(A.at(i, j)))
                throw std::invalid_argument("decompose requires finite matrix entries");

    DecompositionResult res;
    res.k = k;
    res.n = n;
    res.constants = constants;
    res.rescaled = A;
    res.rowScale.assign(k, 1.0);

    Matrix& a = res.rescaled;
    std::vector<char> inN1(n, 1), inK1(k, 1);
    std::vector<int> renorms(k, 0);
    std::vector<std::vector<int>> pending(k);  // columns removed since the row's last renorm
    std::vector<double> rowSq(k, 0.0);

    // initial normalization over N1 = [n]
    for (int i = 0; i < k; ++i) {
        double norm = std::sqrt(row_sq_on(a, i, inN1));
        rescale_row(a, i, 1.0 / norm, i);
        res.rowScale[i] /= norm;
        rowSq[i] = 1.0;
    }

    const double tauW2 = constants.tau * constants.W * constants.W;
    std::vector<double> colSq(n, 0.0);
    for (int j = 0; j < n; ++j) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += a.at(i, j) * a.at(i, j);
        colSq[j] = acc;
    }

    auto potential = [&] {
        double acc = 0.0;
        for (int i = 0; i < k; ++i)
            if (inK1[i]) acc += rowSq[i];
        return acc;
    };

    int n1Count = n, k1Count = k;
    for (;;) {
        int pick = -1;
        for (int j = 0; j < n; ++j) {
            if (inN1[j] && colSq[j] >= tauW2) {
                pick = j;
                break;
            }
        }
        if (pick < 0) break;
        ++res.loopIterations;

        inN1[pick] = 0;
        --n1Count;
        if (n1Count == 0)
            throw DecompError("decomposition removed every column; constants too aggressive");
        for (int i = 0; i < k; ++i) {
            if (!inK1[i]) continue;
            double e = a.at(i, pick);
            rowSq[i] -= e * e;
            pending[i].push_back(pick);
        }

        for (int i = 0; i < k; ++i) {
            if (!inK1[i] || rowSq[i] > constants.tau) continue;
            double fresh = row_sq_on(a, i, inN1);  // drift-free basis for the factor
            if (fresh <= 0.0) throw DecompError("row collapsed to zero at row " + std::to_string(i));
            double factor = 1.0 / std::sqrt(fresh);
            double f2 = factor * factor;
            for (int j = 0; j < n; ++j)
                if (inN1[j]) colSq[j] += (f2 - 1.0) * a.at(i, j) * a.at(i, j);
            rescale_row(a, i, factor, i);
            res.rowScale[i] *= factor;
            rowSq[i] = 1.0;
            ++renorms[i];
            ++res.renormalizations;
            res.history[i].push_back(std::move(pending[i]));
            pending[i].clear();
        }

        for (int i = 0; i < k; ++i) {
            if (!inK1[i] || renorms[i] < constants.S) continue;
            inK1[i] = 0;
            --k1Count;
            for (int j = 0; j < n; ++j)
                if (inN1[j]) colSq[j] -= a.at(i, j) * a.at(i, j);
        }

        if (potential() > k + static_cast<double>(res.renormalizations) + 1e-6 * k)
            res.potentialBoundHeld = false;
    }

    // final renormalization of every row over the final N1
    for (int i = 0; i < k; ++i) {
        double fresh = row_sq_on(a, i, inN1);
        if (fresh <= 0.0) throw DecompError("row collapsed to zero at row " + std::to_string(i));
        double factor = 1.0 / std::sqrt(fresh);
        rescale_row(a, i, factor, i);
        res.rowScale[i] *= factor;
        if (inK1[i]) rowSq[i] = 1.0;
    }
    res.finalPotential = potential();

    for (int j = 0; j < n; ++j) (inN1[j] ? res.N1 : res.N2).push_back(j);
    for (int i = 0; i < k; ++i) (inK1[i] ? res.K1 : res.K2).push_back(i);

    for (int i : res.K2) {
        scales::ScaleCertificate cert;
        cert.delta = 100;
        const auto& groups = res.history.at(i);
        cert.groups.assign(groups.begin(), groups.begin() + constants.S);
        for (const auto& g : cert.groups) {
            scales::Real sq = 0;
            for (int j : g) sq += static_cast<scales::Real>(a.at(i, j)) * a.at(i, j);
            cert.groupNorms.push_back(std::sqrt(sq));
        }
        res.certificates.emplace(i, std::move(cert));
    }
    return res;
}

namespace {

void add_item(DecompCheck& check, std::string name, bool ok, std::string detail = "") {
    check.items.push_back({std::move(name), ok, std::move(detail)});
    check.ok = check.ok && ok;
}

}  // namespace

DecompCheck verify_decomposition(const Matrix& A, const DecompositionResult& r, double tol) {
    DecompCheck check;
    int k = r.k, n = r.n;

    {
        std::vector<char> seenRow(k, 0), seenCol(n, 0);
        bool rowsOk = A.rows == k && r.rescaled.rows == k && A.cols == n && r.rescaled.cols == n;
        for (int i : r.K1)
            if (i < 0 || i >= k || seenRow[i]++) rowsOk = false;
        for (int i : r.K2)
            if (i < 0 || i >= k || seenRow[i]++) rowsOk = false;
        bool colsOk = true;
        for (int j : r.N1)
            if (j < 0 || j >= n || seenCol[j]++) colsOk = false;
        for (int j : r.N2)
            if (j < 0 || j >= n || seenCol[j]++) colsOk = false;
        for (int i = 0; i < k; ++i) rowsOk = rowsOk && seenRow[i] == 1;
        for (int j = 0; j < n; ++j) colsOk = colsOk && seenCol[j] == 1;
        add_item(check, "row partition K1|K2", rowsOk);
        add_item(check, "column partition N1|N2", colsOk);
        if (!rowsOk || !colsOk) return check;
    }

    add_item(check, "|N2| <= n/2", 2 * static_cast<int>(r.N2.size()) <= n,
             "|N2| = " + std::to_string(r.N2.size()));

    {
        bool ok = static_cast<int>(r.rowScale.size()) == k;
        for (int i = 0; ok && i < k; ++i) {
            double phi = r.rowScale[i];
            if (!(phi > 0.0) || !std::isfinite(phi)) ok = false;
            for (int j = 0; ok && j < n; ++j) {
                double want = phi * A.at(i, j);
                if (std::fabs(r.rescaled.at(i, j) - want) >
                    tol * (std::fabs(want) + 1.0))
                    ok = false;
            }
        }
        add_item(check, "A' is a positive row rescaling of A", ok);
    }

    {
        bool ok = true;
        std::string detail;
        for (int i = 0; i < k; ++i) {
            double sq = 0.0;
            for (int j : r.N1) sq += r.rescaled.at(i, j) * r.rescaled.at(i, j);
            if (std::fabs(std::sqrt(sq) - 1.0) > tol) {
                ok = false;
                detail = "row " + std::to_string(i);
                break;
            }
        }
        add_item(check, "unit row norms on N1", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        for (int j : r.N1) {
            double sq = 0.0;
            for (int i : r.K1) sq += r.rescaled.at(i, j) * r.rescaled.at(i, j);
            if (std::sqrt(sq) > r.constants.W * (1.0 + tol)) {
                ok = false;
                detail = "column " + std::to_string(j);
                break;
            }
        }
        add_item(check, "column norms on (K1, N1) bounded by W", ok, detail);
    }

    {
        bool ok = true;
        std::string detail;
        std::vector<char> inN2(n, 0);
        for (int j : r.N2) inN2[j] = 1;
        for (int i : r.K2) {
            auto it = r.certificates.find(i);
            if (it == r.certificates.end()) {
                ok = false;
                detail = "row " + std::to_string(i) + " has no certificate";
                break;
            }
            const auto& cert = it->second;
            if (cert.s() < r.constants.S || cert.delta != 100) {
                ok = false;
                detail = "row " + std::to_string(i) + " certificate shape";
                break;
            }
            bool inside = true;
            for (const auto& g : cert.groups)
                for (int j : g) inside = inside && inN2[j];
            if (!inside) {
                ok = false;
                detail = "row " + std::to_string(i) + " group outside N2";
                break;
            }
            std::vector<scales::Real> row(n);
            for (int j = 0; j < n; ++j) row[j] = r.rescaled.at(i, j);
            if (!scales::verify_certificate(row, cert)) {
                ok = false;
                detail = "row " + std::to_string(i) + " norm chain";
                break;
            }
        }
        add_item(check, "K2 rows certify >= S scales of size 100 inside N2", ok, detail);
    }

    {
        double lhs = static_cast<double>(r.N2.size()) * r.constants.tau * r.constants.W *
                     r.constants.W;
        double rhs = static_cast<double>(k) * (r.constants.S + 1.0);
        add_item(check, "derived bound |N2| tau W^2 <= k (S+1)", lhs <= rhs * (1.0 + tol));
    }

    add_item(check, "potential never exceeded k + #renormalizations", r.potentialBoundHeld);
    return check;
}

}  // namespace hslice
