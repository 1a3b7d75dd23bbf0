#include "qbm/oracle.hpp"

#include <lapacke.h>

#include <cmath>
#include <limits>

namespace qbm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

double thermal_x(double w, double T) {
    double c = T > 0.0 ? 1.0 / std::tanh(w / (2.0 * T)) : 1.0;
    return 0.5 * c / w;
}

double thermal_p(double w, double T) {
    double c = T > 0.0 ? 1.0 / std::tanh(w / (2.0 * T)) : 1.0;
    return 0.5 * w * c;
}

}  // namespace

DiscreteBath build_bath(const BathSpectrum& spec, int n_modes, double omega_max,
                        double horizon_hint) {
    if (n_modes < 100) throw DomainError("build_bath: n_modes must be >= 100");
    if (!(omega_max >= 10.0 * spec.lambda))
        throw DomainError("build_bath: omega_max must cover the cutoff (>= 10 Lambda)");
    DiscreteBath bath;
    bath.n_modes = n_modes;
    bath.omega_max = omega_max;
    std::vector<double> x, w;
    gauss_legendre(n_modes, x, w);
    bath.frequencies.resize(n_modes);
    bath.weights.resize(n_modes);
    bath.couplings.resize(n_modes);
    double min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_modes; ++k) {
        bath.frequencies[k] = 0.5 * omega_max * (x[k] + 1.0);
        bath.weights[k] = 0.5 * omega_max * w[k];
        double Wk = bath.frequencies[k];
        double c2 = 2.0 / kPi * spectral_density(spec, Wk) * Wk * bath.weights[k];
        bath.couplings[k] = c2 > 0.0 ? std::sqrt(c2) : 0.0;
        if (k > 0) min_gap = std::min(min_gap, bath.frequencies[k] - bath.frequencies[k - 1]);
    }
    bath.recurrence_time = 2.0 * kPi / min_gap;
    if (horizon_hint > 0.0 && horizon_hint > 0.5 * bath.recurrence_time)
        throw ResolutionError("build_bath: requested horizon exceeds half the recurrence time");
    return bath;
}

OracleEvolution::OracleEvolution(const DiscreteBath& bath, const ModelParams& params,
                                 const InitialMoments& init) {
    n_ = bath.n_modes + 1;
    omega_sq_ = params.omega_sq;
    const double T = params.temperature;

    // stiffness matrix, column-major
    std::vector<double> K(static_cast<size_t>(n_) * n_, 0.0);
    K[0] = params.omega_sq;
    for (int k = 1; k < n_; ++k) {
        double Wk = bath.frequencies[k - 1];
        K[static_cast<size_t>(k) * n_ + k] = Wk * Wk;
        K[static_cast<size_t>(k) * n_] = -bath.couplings[k - 1];  // row 0, col k
        K[static_cast<size_t>(k)] = 0.0;
    }
    // fill symmetric lower part for LAPACK ('L' uses lower triangle,
    // column-major: element (i,j), i >= j at K[j*n + i])
    for (int k = 1; k < n_; ++k) K[static_cast<size_t>(k)] = -bath.couplings[k - 1];

    evals_.assign(n_, 0.0);
    evecs_ = std::move(K);
    lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n_, evecs_.data(), n_,
                                     evals_.data());
    if (info != 0) throw DiagonalizationFailure("oracle: dsyevd failed, info=" +
                                                std::to_string(info));
    for (double d : evals_)
        if (d <= 0.0)
            throw DiagonalizationFailure("oracle: non-positive normal-mode frequency squared");

    dx_.assign(n_, 0.0);
    dp_.assign(n_, 0.0);
    dx_[0] = init.q2;
    dp_[0] = init.p2;
    pq0_half_ = 0.5 * init.pq_sym;
    for (int k = 1; k < n_; ++k) {
        double Wk = bath.frequencies[k - 1];
        dx_[k] = thermal_x(Wk, T);
        dp_[k] = thermal_p(Wk, T);
    }

    u_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) u_[j] = evecs_[static_cast<size_t>(j) * n_];  // O(0,j)

    hx_.assign(n_, 0.0);
    hp_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const double* col = evecs_.data() + static_cast<size_t>(j) * n_;
        double sx = 0.0, sp = 0.0;
        for (int i = 0; i < n_; ++i) {
            double o2 = col[i] * col[i];
            sx += o2 * dx_[i];
            sp += o2 * dp_[i];
        }
        hx_[j] = sx;
        hp_[j] = sp;
    }

    couplings_.assign(n_, 0.0);
    for (int k = 1; k < n_; ++k) couplings_[k] = bath.couplings[k - 1];

    e_total0_ = at(0.0).e_total;
}

void OracleEvolution::apply_O(const double* in, double* out, bool transpose) const {
    // out = O * in  (or O^T * in); O stored column-major
    for (int i = 0; i < n_; ++i) out[i] = 0.0;
    if (transpose) {
        for (int j = 0; j < n_; ++j) {
            const double* col = evecs_.data() + static_cast<size_t>(j) * n_;
            double acc = 0.0;
            for (int i = 0; i < n_; ++i) acc += col[i] * in[i];
            out[j] = acc;
        }
    } else {
        for (int j = 0; j < n_; ++j) {
            const double* col = evecs_.data() + static_cast<size_t>(j) * n_;
            double c = in[j];
            if (c == 0.0) continue;
            for (int i = 0; i < n_; ++i) out[i] += col[i] * c;
        }
    }
}

CovarianceState OracleEvolution::at(double t) const {
    const int n = n_;
    std::vector<double> cosv(n), sinv(n), theta(n);
    for (int j = 0; j < n; ++j) {
        theta[j] = std::sqrt(evals_[j]);
        cosv[j] = std::cos(theta[j] * t);
        sinv[j] = std::sin(theta[j] * t);
    }
    // a = A^T e0 = O (cos) u ; b = B^T e0 = O (sin/theta) u ; ap = O (-theta sin) u
    std::vector<double> tmp(n), a(n), b(n), ap(n);
    for (int j = 0; j < n; ++j) tmp[j] = cosv[j] * u_[j];
    apply_O(tmp.data(), a.data(), false);
    for (int j = 0; j < n; ++j) tmp[j] = sinv[j] / theta[j] * u_[j];
    apply_O(tmp.data(), b.data(), false);
    for (int j = 0; j < n; ++j) tmp[j] = -theta[j] * sinv[j] * u_[j];
    apply_O(tmp.data(), ap.data(), false);

    CovarianceState st;
    st.time = t;
    double q2 = 0.0, p2 = 0.0, pq = 0.0;
    for (int i = 0; i < n; ++i) {
        q2 += dx_[i] * a[i] * a[i] + dp_[i] * b[i] * b[i];
        p2 += dx_[i] * ap[i] * ap[i] + dp_[i] * a[i] * a[i];
        pq += dx_[i] * a[i] * ap[i] + dp_[i] * b[i] * a[i];
    }
    q2 += 2.0 * pq0_half_ * a[0] * b[0];
    p2 += 2.0 * pq0_half_ * ap[0] * a[0];
    pq += pq0_half_ * (a[0] * a[0] + b[0] * ap[0]);
    st.q2 = q2;
    st.p2 = p2;
    st.pq_sym = 2.0 * pq;

    // Sigma_x e0 = A(Dx a) + B(Dp b) + A(Dxp b) + B(Dxp a)
    std::vector<double> v1(n), v2(n), sxe(n, 0.0);
    auto add_Av = [&](const std::vector<double>& diagmul, const std::vector<double>& vec,
                      const std::vector<double>& trig, bool over_theta, double scale) {
        for (int i = 0; i < n; ++i) v1[i] = diagmul.empty() ? vec[i] : diagmul[i] * vec[i];
        apply_O(v1.data(), v2.data(), true);
        for (int j = 0; j < n; ++j)
            v2[j] *= over_theta ? trig[j] / theta[j] : trig[j];
        apply_O(v2.data(), v1.data(), false);
        for (int i = 0; i < n; ++i) sxe[i] += scale * v1[i];
    };
    add_Av(dx_, a, cosv, false, 1.0);
    add_Av(dp_, b, sinv, true, 1.0);
    // Dxp has only the (0,0) entry
    std::vector<double> e0vec(n, 0.0);
    e0vec[0] = 1.0;
    add_Av({}, e0vec, cosv, false, pq0_half_ * b[0]);
    add_Av({}, e0vec, sinv, true, pq0_half_ * a[0]);
    double qB = 0.0;
    for (int i = 1; i < n; ++i) qB += couplings_[i] * sxe[i];
    st.q_bath_corr = qB;

    // traces for the energy bookkeeping
    double tr_p = 0.0, tr_Kx = 0.0;
    for (int j = 0; j < n; ++j) {
        double s2 = sinv[j] * sinv[j];
        double c2 = cosv[j] * cosv[j];
        double th2 = theta[j] * theta[j];
        tr_p += th2 * s2 * hx_[j] + c2 * hp_[j];
        tr_Kx += th2 * c2 * hx_[j] + s2 * hp_[j];
        // rank-one D_xp parts
        double cross_p = -2.0 * theta[j] * sinv[j] * cosv[j] * pq0_half_ * u_[j] * u_[j];
        double cross_x = 2.0 * theta[j] * cosv[j] * sinv[j] * pq0_half_ * u_[j] * u_[j];
        tr_p += cross_p;
        tr_Kx += cross_x;
    }
    st.e_system = 0.5 * (st.p2 + omega_sq_ * st.q2);
    st.e_interaction = -qB;
    // tr(diag(0, W^2) Sigma_x) = tr(K Sigma_x) - Omega^2 q2 + 2 qB
    double bath_pot = tr_Kx - omega_sq_ * st.q2 + 2.0 * qB;
    double bath_kin = tr_p - st.p2;
    st.e_bath = 0.5 * (bath_pot + bath_kin);
    st.e_total = st.e_system + st.e_interaction + st.e_bath;
    return st;
}

std::vector<double> OracleEvolution::full_covariance(double t) const {
    if (n_ > 800) throw DomainError("full_covariance: meant for small N verification");
    const int n = n_;
    std::vector<double> cosv(n), sinth(n), msinth(n), theta(n);
    for (int j = 0; j < n; ++j) {
        theta[j] = std::sqrt(evals_[j]);
        cosv[j] = std::cos(theta[j] * t);
        sinth[j] = std::sin(theta[j] * t) / theta[j];
        msinth[j] = -std::sin(theta[j] * t) * theta[j];
    }
    auto matmul_diag = [&](const std::vector<double>& d) {
        // returns O diag(d) O^T, column-major n x n
        std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += evecs_[static_cast<size_t>(j) * n + r] * d[j] *
                           evecs_[static_cast<size_t>(j) * n + c];
                m[static_cast<size_t>(c) * n + r] = acc;
            }
        return m;
    };
    std::vector<double> A = matmul_diag(cosv), B = matmul_diag(sinth), Ap = matmul_diag(msinth);

    int dim = 2 * n;
    std::vector<double> cov(static_cast<size_t>(dim) * dim, 0.0);
    auto accumulate = [&](const std::vector<double>& L, const std::vector<double>& D,
                          const std::vector<double>& R, int blockR, int blockC) {
        // cov_block += L diag(D) R^T
        for (int c = 0; c < n; ++c)
            for (int r = 0; r < n; ++r) {
                double acc = 0.0;
                for (int m = 0; m < n; ++m)
                    acc += L[static_cast<size_t>(m) * n + r] * D[m] *
                           R[static_cast<size_t>(m) * n + c];
                cov[static_cast<size_t>(blockC * n + c) * dim + blockR * n + r] += acc;
            }
    };
    std::vector<double> dxp(n, 0.0);
    dxp[0] = pq0_half_;
    // xx block
    accumulate(A, dx_, A, 0, 0);
    accumulate(B, dp_, B, 0, 0);
    accumulate(A, dxp, B, 0, 0);
    accumulate(B, dxp, A, 0, 0);
    // pp block
    accumulate(Ap, dx_, Ap, 1, 1);
    accumulate(A, dp_, A, 1, 1);
    accumulate(Ap, dxp, A, 1, 1);
    accumulate(A, dxp, Ap, 1, 1);
    // xp block
    accumulate(A, dx_, Ap, 0, 1);
    accumulate(B, dp_, A, 0, 1);
    accumulate(A, dxp, A, 0, 1);
    accumulate(B, dxp, Ap, 0, 1);
    // px block = transpose of xp
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r)
            cov[static_cast<size_t>(c) * dim + n + r] =
                cov[static_cast<size_t>(n + r) * dim + c];
    return cov;
}

std::vector<CovarianceState> evolve(const DiscreteBath& bath, const ModelParams& params,
                                    const InitialMoments& init,
                                    const std::vector<double>& t_grid) {
    if (!t_grid.empty() && t_grid.back() > 0.5 * bath.recurrence_time)
        throw ResolutionError("evolve: t_grid extends beyond half the recurrence time");
    OracleEvolution evo(bath, params, init);
    std::vector<CovarianceState> states;
    states.reserve(t_grid.size());
    for (double t : t_grid) states.push_back(evo.at(t));
    return states;
}

OracleMeasurement measure(const std::vector<CovarianceState>& states, double window_start,
                          double window_end) {
    if (states.empty()) throw WindowError("measure: empty trajectory");
    if (!(window_start < window_end)) throw WindowError("measure: bad window");
    if (window_start < states.front().time || window_end > states.back().time + 1e-12)
        throw WindowError("measure: window outside the simulated horizon");

    double q2 = 0.0, p2 = 0.0, pq = 0.0, qB = 0.0, wsum = 0.0;
    double drift = 0.0;
    double e0 = states.front().e_total;
    double es = 0.0, ei = 0.0, eb = 0.0;
    for (size_t i = 0; i < states.size(); ++i) {
        drift = std::max(drift, std::abs(states[i].e_total - e0) / std::abs(e0));
        const auto& s = states[i];
        if (s.time < window_start || s.time > window_end) continue;
        double w = 1.0;
        q2 += w * s.q2;
        p2 += w * s.p2;
        pq += w * s.pq_sym;
        qB += w * s.q_bath_corr;
        es += w * s.e_system;
        ei += w * s.e_interaction;
        eb += w * s.e_bath;
        wsum += w;
    }
    if (wsum == 0.0) throw WindowError("measure: no samples inside the window");
    OracleMeasurement m;
    m.moments.q2 = q2 / wsum;
    m.moments.p2 = p2 / wsum;
    m.moments.pq_sym = pq / wsum;
    m.moments.method = Method::DiscreteOracle;
    m.interaction_energy = -qB / wsum;
    m.flow.delta_e_interaction = m.interaction_energy;
    m.energy_drift = drift;
    // changes relative to t = 0 bookkeeping are taken from the first sample
    m.flow.delta_e_system = es / wsum - states.front().e_system;
    m.flow.delta_e_bath = eb / wsum - states.front().e_bath;
    return m;
}

}  // namespace qbm
