#include "cfs/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace cfs {

static std::string fmt_double(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

static void emit(const Json& j, int indent, std::string& out) {
    const std::string pad(indent + 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            emit(it.value(), indent + 2, out);
        }
        out += "\n" + std::string(indent, ' ') + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        bool scalars = true;
        for (const auto& e : j) scalars = scalars && !e.is_structured();
        out += "[";
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += scalars ? ", " : ",";
            first = false;
            if (!scalars) out += "\n" + pad;
            emit(e, indent + 2, out);
        }
        if (!scalars) out += "\n" + std::string(indent, ' ');
        out += "]";
        return;
    }
    case Json::value_t::number_float:
        out += fmt_double(j.get<double>());
        return;
    default:
        out += j.dump();
    }
}

std::string emit_json(const Json& j) {
    std::string out;
    emit(j, 0, out);
    out += "\n";
    return out;
}

std::string emit_csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size()) fail(ErrorCode::DimensionMismatch, "csv row width differs from header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            const double v = row[i];
            if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15)
                out += std::to_string(static_cast<long long>(v));
            else
                out += std::isfinite(v) ? fmt_double(v) : "nan";
        }
        out += "\n";
    }
    return out;
}

std::string sigma_csv(const LatticeConservation& c) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < c.t.size(); ++i)
        rows.push_back({static_cast<double>(c.t[i]), c.sigma[i], std::max(c.drift_scalar[i], c.drift_phi[i])});
    return emit_csv({"t", "sigma", "drift"}, rows);
}

Json vec_json(const Vec& v) {
    Json a = Json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json to_json(const ElReport& r) {
    Json j;
    j["nu"] = r.nu;
    j["ell_on_support"] = r.ell_on_support;
    j["max_abs_support"] = r.max_abs_support;
    j["inf_probe"] = r.inf_probe;
    j["argmin_probe"] = vec_json(r.argmin_probe);
    return j;
}

Json to_json(const LatticeElReport& r) {
    Json j;
    j["nu"] = r.el.nu;
    j["interior_sites"] = r.interior_sites;
    j["max_abs_interior"] = r.el.max_abs_support;
    j["inf_probe"] = r.el.inf_probe;
    j["min_off_lattice"] = r.min_off_lattice;
    j["min_phi_offset"] = r.min_phi_offset;
    j["argmin_probe"] = vec_json(r.el.argmin_probe);
    return j;
}

Json to_json(const LatticeConservation& r) {
    Json j;
    j["steps"] = r.t.empty() ? 0 : static_cast<int>(r.t.size()) - 1;
    j["sigma_initial"] = r.sigma.empty() ? 0.0 : r.sigma.front();
    j["sigma_final"] = r.sigma.empty() ? 0.0 : r.sigma.back();
    j["max_drift"] = r.max_drift;
    j["tol"] = r.tol;
    j["pass"] = r.pass;
    return j;
}

Json to_json(const ConservationReport& r) {
    Json j;
    j["mode"] = r.mode;
    j["derivative_estimate"] = r.derivative_estimate;
    j["error_estimate"] = r.error_estimate;
    j["h_used"] = r.h_used;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["symmetry_violation"] = r.symmetry_violation;
    j["nid1"] = r.nid1;
    j["nid2"] = r.nid2;
    j["nid3"] = r.nid3;
    return j;
}

Json to_json(const BookkeepingIdentity& r) {
    Json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["nid2"] = r.nid2;
    j["nid3"] = r.nid3;
    j["scale"] = r.scale;
    return j;
}

Json to_json(const BalanceReport& r) {
    Json j;
    j["sigma"] = r.sigma;
    j["chi_tilde_sum"] = r.chi_tilde_sum;
    j["commutator_term"] = r.commutator_term;
    j["residual"] = r.residual;
    j["alt_form"] = r.alt_form;
    j["scale"] = r.scale;
    return j;
}

Json to_json(const SemiDerivReport& r) {
    Json j;
    j["plus"] = r.plus;
    j["minus"] = r.minus;
    j["symmetric"] = r.symmetric;
    j["differentiable"] = r.differentiable;
    j["h_used"] = r.h_used;
    return j;
}

Json to_json(const SecondOrderReport& r) {
    Json j;
    j["lhs"] = r.lhs;
    j["chi1"] = r.chi1;
    j["chi2"] = r.chi2;
    j["residual"] = r.residual;
    return j;
}

static Json cplx_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ClosedChainDecomposition& r) {
    Json j;
    j["a_coef"] = cplx_json(r.a_coef);
    j["b_coef"] = cplx_json(r.b_coef);
    j["residual"] = r.residual;
    return j;
}

Json to_json(const CausalMapReport& r) {
    Json j;
    j["agreement"] = r.agreement;
    j["pairs"] = r.pairs;
    j["threshold"] = r.threshold;
    j["separations"] = r.separations;
    Json d = Json::array();
    for (const auto& e : r.disagreements) d.push_back(Json::array({e[0], e[1]}));
    j["disagreements"] = d;
    j["spacelike_classified"] = r.spacelike_classified;
    j["max_conjugate_deviation"] = r.max_conjugate_deviation;
    j["timelike_classified"] = r.timelike_classified;
    j["max_eigen_mismatch"] = r.max_eigen_mismatch;
    j["median_eigen_mismatch"] = r.median_eigen_mismatch;
    j["max_residual"] = r.max_residual;
    j["median_residual"] = r.median_residual;
    return j;
}

Json to_json(const ProductSpectrum& s) {
    Json j;
    Json e = Json::array();
    for (const auto& z : s.eigs) e.push_back(cplx_json(z));
    j["eigenvalues"] = e;
    j["spectral_weight"] = s.weight_abs;
    j["weight_sq"] = s.weight_sq;
    return j;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    f << content;
    if (!f) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace cfs
