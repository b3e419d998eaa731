#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "stepscat/errors.hpp"
#include "stepscat/marchenko.hpp"
#include "stepscat/scattering.hpp"
#include "stepscat/types.hpp"

namespace stepscat {

struct Problem {
    DensityProfile profile;
    BoundaryCoefficients boundary;
    PotentialSpec potential;
    NumericsConfig numerics;
};

namespace io_detail {

using nlohmann::json;

inline const json& need(const json& j, const char* key, const std::string& scope) {
    if (!j.contains(key))
        throw ValidationError("MissingField",
                              scope.empty() ? std::string(key) : scope + "." + key);
    return j.at(key);
}

inline std::vector<double> as_doubles(const json& j, const std::string& what) {
    if (!j.is_array()) throw ValidationError("InvalidField", what + " must be an array");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ValidationError("InvalidField", what + " must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("FileNotReadable", path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError("MalformedJson", std::string(e.what()) + " in " + path);
    }
    return j;
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace io_detail

inline Problem problem_from_json(const nlohmann::json& j) {
    using io_detail::need;
    Problem prob;
    prob.profile.alpha = need(j, "alpha", "").get<double>();
    prob.profile.a = need(j, "a", "").get<double>();
    const auto bc = io_detail::as_doubles(need(j, "boundary", ""), "boundary");
    if (bc.size() != 6)
        throw ValidationError("InvalidField", "boundary must hold exactly 6 coefficients");
    prob.boundary = {bc[0], bc[1], bc[2], bc[3], bc[4], bc[5]};
    if (j.contains("potential")) {
        const auto& jp = j.at("potential");
        prob.potential.grid = io_detail::as_doubles(need(jp, "grid", "potential"), "potential.grid");
        prob.potential.values =
            io_detail::as_doubles(need(jp, "values", "potential"), "potential.values");
        prob.potential.support_bound = need(jp, "support_bound", "potential").get<double>();
    } else {
        prob.potential = zero_potential();
    }
    prob.numerics = default_numerics(prob.profile, prob.potential);
    prob.numerics.y_max = 0.0;  // resolved later against the data
    if (j.contains("numerics")) {
        const auto& jn = j.at("numerics");
        auto opt = [&](const char* key, double& slot) {
            if (jn.contains(key)) slot = jn.at(key).get<double>();
        };
        opt("x_max", prob.numerics.x_max);
        opt("h_x", prob.numerics.h_x);
        opt("lambda_max", prob.numerics.lambda_max);
        opt("y_max", prob.numerics.y_max);
        opt("root_tol", prob.numerics.root_tol);
        opt("quad_tol", prob.numerics.quad_tol);
        opt("solve_tol", prob.numerics.solve_tol);
        opt("mu_max", prob.numerics.mu_max);
        if (jn.contains("n_lambda")) prob.numerics.n_lambda = jn.at("n_lambda").get<int>();
        if (jn.contains("degenerate_alpha_ok"))
            prob.numerics.degenerate_ok = jn.at("degenerate_alpha_ok").get<bool>();
    }
    return prob;
}

inline Problem load_problem(const std::string& path) {
    return problem_from_json(io_detail::read_json_file(path));
}

inline nlohmann::json scattering_to_json(const ScatteringData& sd) {
    nlohmann::json j;
    j["lambda_grid"] = sd.lambda_grid;
    std::vector<double> re, im;
    re.reserve(sd.s_values.size());
    im.reserve(sd.s_values.size());
    for (const cplx& s : sd.s_values) {
        re.push_back(s.real());
        im.push_back(s.imag());
    }
    j["s_re"] = re;
    j["s_im"] = im;
    j["bound_states"] = sd.bound_states;
    j["norming"] = sd.norming;
    return j;
}

inline ScatteringData scattering_from_json(const nlohmann::json& j) {
    using io_detail::need;
    ScatteringData sd;
    sd.lambda_grid = io_detail::as_doubles(need(j, "lambda_grid", ""), "lambda_grid");
    const auto re = io_detail::as_doubles(need(j, "s_re", ""), "s_re");
    const auto im = io_detail::as_doubles(need(j, "s_im", ""), "s_im");
    if (re.size() != sd.lambda_grid.size() || im.size() != re.size())
        throw ValidationError("InvalidField", "s_re/s_im lengths must match lambda_grid");
    sd.s_values.reserve(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) sd.s_values.emplace_back(re[i], im[i]);
    sd.bound_states = io_detail::as_doubles(need(j, "bound_states", ""), "bound_states");
    sd.norming = io_detail::as_doubles(need(j, "norming", ""), "norming");
    return sd;
}

inline ScatteringData load_scattering(const std::string& path) {
    return scattering_from_json(io_detail::read_json_file(path));
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("FileNotWritable", path);
    out << text;
}

inline void save_json(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

// CSV of the reflection coefficient with its deviation from the layered
// zero-potential reference.
inline std::string scattering_csv(const ScatteringData& sd, const DensityProfile& p,
                                  const BoundaryCoefficients& c) {
    std::ostringstream os;
    os << "lambda,re_s,im_s,abs_s_minus_s0\n";
    for (std::size_t i = 0; i < sd.lambda_grid.size(); ++i) {
        const double lam = sd.lambda_grid[i];
        const double dev = std::abs(sd.s_values[i] - s_zero(p, c, lam));
        os << io_detail::fmt17(lam) << ',' << io_detail::fmt17(sd.s_values[i].real()) << ','
           << io_detail::fmt17(sd.s_values[i].imag()) << ',' << io_detail::fmt17(dev) << '\n';
    }
    return os.str();
}

inline std::string potential_csv(const PotentialSpec& q) {
    std::ostringstream os;
    os << "x,q\n";
    for (std::size_t i = 0; i < q.grid.size(); ++i)
        os << io_detail::fmt17(q.grid[i]) << ',' << io_detail::fmt17(q.values[i]) << '\n';
    return os.str();
}

inline std::string transition_csv(const TransitionTable& tt) {
    std::ostringstream os;
    os << "t,f0s\n";
    for (std::size_t i = 0; i < tt.vals.size(); ++i)
        os << io_detail::fmt17(tt.t_lo + tt.ht * static_cast<double>(i)) << ','
           << io_detail::fmt17(tt.vals[i]) << '\n';
    return os.str();
}

inline std::string kernel_csv(const KernelTable& kt) {
    std::ostringstream os;
    os << "x,y,k\n";
    for (const KernelSlice& s : kt.slices)
        for (std::size_t i = 0; i < s.y.size(); ++i)
            os << io_detail::fmt17(s.x) << ',' << io_detail::fmt17(s.y[i]) << ','
               << io_detail::fmt17(s.K[i]) << '\n';
    return os.str();
}

inline nlohmann::json report_to_json(const ReconstructionReport& rep) {
    nlohmann::json j;
    j["sup_rel_error"] = rep.sup_rel_error;
    j["l1_rel_error"] = rep.l1_rel_error;
    j["jump_residual"] = rep.jump_residual;
    double cmax = 0.0;
    for (double cv : rep.condition_numbers) cmax = std::max(cmax, cv);
    j["condition_max"] = cmax;
    j["condition_numbers"] = rep.condition_numbers;
    j["refinement_delta"] = rep.refinement_delta;
    return j;
}

}  // namespace stepscat
