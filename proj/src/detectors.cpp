#include "stskotfs/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stskotfs/errors.hpp"

namespace stskotfs {

namespace {

constexpr std::uint64_t kSearchSpaceGuard = 1ull << 24;

Eigen::MatrixXcd gather_columns(const Eigen::MatrixXcd& c, const std::vector<int>& dap) {
    Eigen::MatrixXcd sub(c.rows(), static_cast<Eigen::Index>(dap.size()));
    for (size_t b = 0; b < dap.size(); ++b) sub.col(static_cast<Eigen::Index>(b)) = c.col(dap[b]);
    return sub;
}

/// Least squares on the pattern's columns followed by symbol-wise nearest-point
/// quantization; the shared inner step of PRCGD and IRCD.
struct DapTest {
    Eigen::VectorXcd apm;
    double residual;
};

DapTest test_dap(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& c,
                 const std::vector<int>& dap, const Constellation& constellation) {
    const Eigen::MatrixXcd sub = gather_columns(c, dap);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(sub);
    if (qr.rank() < sub.cols())
        fail(ErrorKind::SolveFailure, "rank-deficient pattern submatrix in least squares");
    const Eigen::VectorXcd ls = qr.solve(y);
    DapTest out;
    out.apm.resize(ls.size());
    for (Eigen::Index i = 0; i < ls.size(); ++i)
        out.apm[i] = constellation.points[constellation.nearest(ls[i])];
    out.residual = (y - sub * out.apm).squaredNorm();
    return out;
}

} // namespace

std::uint64_t dap_space_size(const ValidatedConfig& cfg) {
    std::uint64_t size = 1;
    for (int b = 0; b < cfg.m_d; ++b) {
        if (size > kSearchSpaceGuard / static_cast<std::uint64_t>(cfg.q))
            fail(ErrorKind::SearchSpaceTooLarge,
                 "activation-pattern space Q^M_d exceeds the enumeration guard");
        size *= static_cast<std::uint64_t>(cfg.q);
    }
    return size;
}

std::vector<int> dap_from_index(std::uint64_t c, const ValidatedConfig& cfg) {
    std::vector<int> dap(cfg.m_d);
    for (int b = cfg.m_d - 1; b >= 0; --b) {
        dap[b] = static_cast<int>(b) * cfg.q + static_cast<int>(c % cfg.q);
        c /= cfg.q;
    }
    return dap;
}

std::vector<SparseSymbolVector> materialize_codebook(const Codebook& codebook) {
    std::vector<SparseSymbolVector> codewords;
    codewords.reserve(codebook.size());
    for (std::uint32_t message = 0; message < codebook.size(); ++message)
        codewords.push_back(codebook.codeword(message));
    return codewords;
}

DetectionResult mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                    const std::vector<SparseSymbolVector>& codewords) {
    DetectionResult best;
    best.residual = std::numeric_limits<double>::infinity();
    std::uint32_t best_message = 0;
    Eigen::VectorXcd r(y.size());
    for (std::uint32_t message = 0; message < codewords.size(); ++message) {
        const SparseSymbolVector& k = codewords[message];
        r = y;
        for (size_t b = 0; b < k.dap.size(); ++b)
            r -= k.apm[static_cast<Eigen::Index>(b)] * channel.c.col(k.dap[b]);
        const double residual = r.squaredNorm();
        if (residual < best.residual) {
            best.residual = residual;
            best_message = message;
        }
    }
    best.dap = codewords[best_message].dap;
    best.apm = codewords[best_message].apm;
    best.candidates_tested = codewords.size();
    best.dap_evaluations = 0;
    return best;
}

DetectionResult mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                    const Codebook& codebook) {
    return mld(y, channel, materialize_codebook(codebook));
}

DetectionResult factorized_mld(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                               const ValidatedConfig& cfg, const Constellation& constellation) {
    const std::uint64_t n_daps = dap_space_size(cfg);
    std::uint64_t apm_space = 1;
    for (int b = 0; b < cfg.m_d; ++b) {
        if (apm_space > kSearchSpaceGuard / static_cast<std::uint64_t>(cfg.v))
            fail(ErrorKind::SearchSpaceTooLarge, "APM space V^M_d exceeds the enumeration guard");
        apm_space *= static_cast<std::uint64_t>(cfg.v);
    }
    if (n_daps > kSearchSpaceGuard / apm_space)
        fail(ErrorKind::SearchSpaceTooLarge, "joint space (VQ)^M_d exceeds the enumeration guard");

    DetectionResult best;
    best.residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXcd apm(cfg.m_d);
    for (std::uint64_t c = 0; c < n_daps; ++c) {
        const std::vector<int> dap = dap_from_index(c, cfg);
        const Eigen::MatrixXcd sub = gather_columns(channel.c, dap);
        for (std::uint64_t f = 0; f < apm_space; ++f) {
            std::uint64_t rest = f;
            for (int b = cfg.m_d - 1; b >= 0; --b) {
                apm[b] = constellation.points[rest % cfg.v];
                rest /= cfg.v;
            }
            const double residual = (y - sub * apm).squaredNorm();
            if (residual < best.residual) {
                best.residual = residual;
                best.dap = dap;
                best.apm = apm;
            }
        }
    }
    best.candidates_tested = n_daps * apm_space;
    best.dap_evaluations = n_daps;
    return best;
}

Eigen::VectorXcd lmmse_soft_estimate(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& c,
                                     double gamma, int q) {
    if (gamma <= 0) fail(ErrorKind::InvalidParameter, "gamma must be positive");
    const double gamma_s = gamma / q;
    Eigen::MatrixXcd gram = c.adjoint() * c;
    gram.diagonal().array() += 1.0 / gamma_s;
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
        fail(ErrorKind::SolveFailure, "LDLT factorization of the regularized Gram failed");
    const Eigen::VectorXcd soft = ldlt.solve(c.adjoint() * y);
    if (!soft.allFinite()) fail(ErrorKind::SolveFailure, "regularized solve returned non-finite values");
    return soft;
}

ReliabilityOrder element_reliabilities(const Eigen::VectorXcd& soft) {
    ReliabilityOrder out;
    out.order.resize(soft.size());
    std::iota(out.order.begin(), out.order.end(), 0);
    std::vector<double> energy(soft.size());
    for (Eigen::Index i = 0; i < soft.size(); ++i) energy[i] = std::norm(soft[i]);
    std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
        if (energy[a] != energy[b]) return energy[a] > energy[b];
        return a < b;
    });
    out.scores.resize(soft.size());
    for (size_t i = 0; i < out.order.size(); ++i) out.scores[i] = energy[out.order[i]];
    return out;
}

DetectionResult prcgd(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                      const ValidatedConfig& cfg, const Constellation& constellation, int t1,
                      double eps0, double gamma, int max_daps_per_iter) {
    if (t1 < 1) fail(ErrorKind::InvalidParameter, "t1 must be >= 1");
    if (eps0 < 0) fail(ErrorKind::InvalidParameter, "eps0 must be >= 0");
    const std::uint64_t n_daps = dap_space_size(cfg);

    const Eigen::VectorXcd soft = lmmse_soft_estimate(y, channel.c, gamma, cfg.q);
    const ReliabilityOrder reliability = element_reliabilities(soft);

    std::vector<bool> tested(n_daps, false);
    DetectionResult best;
    best.residual = std::numeric_limits<double>::infinity();
    double latest_local = std::numeric_limits<double>::infinity();
    std::uint64_t remaining = n_daps;

    const int max_iters = std::min<std::int64_t>(t1, static_cast<std::int64_t>(cfg.k_dim()));
    for (int t = 0; t < max_iters && remaining > 0; ++t) {
        // early exit on the most recent residual before gathering new patterns
        if (latest_local < eps0) break;

        const int element = reliability.order[t];
        const int block = element / cfg.q;
        const int offset = element % cfg.q;

        // all untested patterns whose block `block` activates `offset`
        std::vector<std::uint64_t> gathered;
        std::uint64_t stride = 1;
        for (int b = block + 1; b < cfg.m_d; ++b) stride *= cfg.q;
        for (std::uint64_t c = 0; c < n_daps; ++c) {
            if (c / stride % cfg.q != static_cast<std::uint64_t>(offset)) continue;
            if (tested[c]) continue;
            gathered.push_back(c);
            if (max_daps_per_iter > 0 &&
                gathered.size() == static_cast<size_t>(max_daps_per_iter))
                break;
        }
        if (gathered.empty()) continue;

        double local_best = std::numeric_limits<double>::infinity();
        std::vector<int> local_dap;
        Eigen::VectorXcd local_apm;
        for (std::uint64_t c : gathered) {
            tested[c] = true;
            --remaining;
            const std::vector<int> dap = dap_from_index(c, cfg);
            const DapTest trial = test_dap(y, channel.c, dap, constellation);
            ++best.dap_evaluations;
            if (trial.residual < local_best) {
                local_best = trial.residual;
                local_dap = dap;
                local_apm = trial.apm;
            }
        }
        latest_local = local_best;
        if (local_best < best.residual) {
            best.residual = local_best;
            best.dap = std::move(local_dap);
            best.apm = std::move(local_apm);
        }
        if (latest_local < eps0) break;
    }
    best.candidates_tested = best.dap_evaluations;
    return best;
}

DetectionResult ircd(const Eigen::VectorXcd& y, const EquivalentChannel& channel,
                     const ValidatedConfig& cfg, const Constellation& constellation, int t2,
                     double gamma) {
    const std::uint64_t n_daps = dap_space_size(cfg);
    if (t2 < 1 || static_cast<std::uint64_t>(t2) > n_daps)
        fail(ErrorKind::InvalidParameter, "t2 must lie in [1, Q^M_d]");

    const Eigen::VectorXcd soft = lmmse_soft_estimate(y, channel.c, gamma, cfg.q);
    std::vector<double> energy(soft.size());
    for (Eigen::Index i = 0; i < soft.size(); ++i) energy[i] = std::norm(soft[i]);

    // pattern reliability = summed element energies over its support
    std::vector<double> rho(n_daps, 0.0);
    for (std::uint64_t c = 0; c < n_daps; ++c) {
        std::uint64_t rest = c;
        double sum = 0.0;
        for (int b = cfg.m_d - 1; b >= 0; --b) {
            sum += energy[static_cast<size_t>(b) * cfg.q + rest % cfg.q];
            rest /= cfg.q;
        }
        rho[c] = sum;
    }
    std::vector<std::uint64_t> ranking(n_daps);
    std::iota(ranking.begin(), ranking.end(), 0);
    std::sort(ranking.begin(), ranking.end(), [&](std::uint64_t a, std::uint64_t b) {
        if (rho[a] != rho[b]) return rho[a] > rho[b];
        return a < b;
    });

    DetectionResult best;
    best.residual = std::numeric_limits<double>::infinity();
    for (int t = 0; t < t2; ++t) {
        const std::vector<int> dap = dap_from_index(ranking[t], cfg);
        const DapTest trial = test_dap(y, channel.c, dap, constellation);
        ++best.dap_evaluations;
        if (trial.residual < best.residual) {
            best.residual = trial.residual;
            best.dap = dap;
            best.apm = trial.apm;
        }
    }
    best.candidates_tested = static_cast<std::uint64_t>(t2);
    return best;
}

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Mld: return "mld";
        case DetectorKind::FactorizedMld: return "factorized-mld";
        case DetectorKind::Prcgd: return "prcgd";
        case DetectorKind::Ircd: return "ircd";
    }
    return "unknown";
}

ComplexityReport complexity_report(const DetectionResult& result, const ValidatedConfig& cfg,
                                   DetectorKind kind, int iterations) {
    ComplexityReport report;
    report.kind = kind;
    report.measured_candidates = result.candidates_tested;
    report.measured_dap_evaluations = result.dap_evaluations;

    const double md = cfg.m_d;
    report.mld_order = std::pow(double(cfg.v) * cfg.q, md);
    report.prcgd_best_order = md * cfg.v;
    report.prcgd_worst_order = std::pow(double(cfg.q), md) * md * cfg.v;
    report.ircd_order_per_t2 = md * cfg.v;
    report.simo_otfs_order = std::pow(double(cfg.v), double(cfg.m) * cfg.n);
    report.sm_otfs_order = std::pow(double(cfg.n_t) * cfg.v, double(cfg.m) * cfg.n);
    report.stsk_ofdm_ma_order = std::pow(double(cfg.q) * cfg.v, double(cfg.m));

    switch (kind) {
        case DetectorKind::Mld:
        case DetectorKind::FactorizedMld:
            report.analytic_order = report.mld_order;
            break;
        case DetectorKind::Prcgd:
            report.analytic_order =
                static_cast<double>(result.dap_evaluations) * md * cfg.v;
            break;
        case DetectorKind::Ircd:
            report.analytic_order = static_cast<double>(iterations) * md * cfg.v;
            break;
    }
    return report;
}

} // namespace stskotfs
