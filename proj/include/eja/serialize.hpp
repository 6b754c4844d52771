#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "eja/embed_verify.hpp"
#include "eja/hypothesis.hpp"

namespace eja {

// Shortest-exact decimal form; used everywhere output must be byte-stable.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

// Infinite values are semantic (support violations), serialized as strings.
inline nlohmann::json json_value(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline nlohmann::json element_to_json(const Element& x) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x.coeffs.size(); ++i) coeffs.push_back(x.coeffs[i]);
    return nlohmann::json{{"algebra_spec", x.algebra->spec_string()}, {"coeffs", coeffs}};
}

inline Element element_from_json(const nlohmann::json& j, std::size_t budget = kDefaultBudget) {
    if (!j.contains("algebra_spec") || !j.contains("coeffs"))
        throw ParseError("element JSON needs algebra_spec and coeffs");
    AlgebraPtr a = build_algebra(j.at("algebra_spec").get<std::string>(), budget);
    const auto& arr = j.at("coeffs");
    if (static_cast<Eigen::Index>(arr.size()) != a->dim())
        throw ParseError("coeffs length does not match algebra dim");
    Eigen::VectorXd c(a->dim());
    for (Eigen::Index i = 0; i < a->dim(); ++i) c[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return a->element(std::move(c));
}

// {quantity, s, value_nats} records for entropy reports.
inline nlohmann::json entropy_record(const std::string& quantity, double s, double value_nats) {
    return nlohmann::json{{"quantity", quantity}, {"s", s}, {"value_nats", json_value(value_nats)}};
}

inline nlohmann::json distribution_to_json(const Distribution& d) {
    nlohmann::json probs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < d.probs.size(); ++i) probs.push_back(d.probs[i]);
    return nlohmann::json{{"probs", probs}, {"labels", d.labels}};
}

// Basis images as complex matrices in row-major {re, im} layout.
inline nlohmann::json matrix_to_json(const Eigen::MatrixXcd& M) {
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            rrow.push_back(M(i, j).real());
            irow.push_back(M(i, j).imag());
        }
        re.push_back(rrow);
        im.push_back(irow);
    }
    return nlohmann::json{{"re", re}, {"im", im}};
}

inline std::string stein_csv_header() {
    return "n,pinched_rate,achievable_exponent,converse_bound,target,gap_bound";
}

inline std::string stein_csv_row(const SteinRecord& r) {
    return std::to_string(r.n) + "," + fmt_double(r.pinched_rate) + "," +
           fmt_double(r.achievable_exponent) + "," + fmt_double(r.converse_bound) + "," +
           fmt_double(r.target) + "," + fmt_double(r.gap_bound);
}

inline nlohmann::json stein_record_to_json(const SteinRecord& r) {
    return nlohmann::json{{"n", r.n},
                          {"pinched_rate", json_value(r.pinched_rate)},
                          {"achievable_exponent", json_value(r.achievable_exponent)},
                          {"converse_bound", json_value(r.converse_bound)},
                          {"target", json_value(r.target)},
                          {"gap_bound", json_value(r.gap_bound)},
                          {"beta_deterministic", json_value(r.beta_deterministic)}};
}

inline nlohmann::json axiom_report_to_json(const AxiomReport& r) {
    return nlohmann::json{{"max_residual_j1", json_value(r.max_residual_j1)},
                          {"max_residual_j2", json_value(r.max_residual_j2)},
                          {"max_residual_j3", json_value(r.max_residual_j3)},
                          {"max_cone_violation", json_value(r.max_cone_violation)},
                          {"trials", r.trials}};
}

// Embedding with its basis images as complex matrices.
inline nlohmann::json embedding_to_json(const Embedding& emb) {
    nlohmann::json images = nlohmann::json::array();
    for (const auto& img : emb.basis_images) images.push_back(matrix_to_json(cherm_to_matrix(img)));
    return nlohmann::json{{"name", emb.name},
                          {"source", emb.source->spec_string()},
                          {"target", emb.target->spec_string()},
                          {"basis_images", images}};
}

inline nlohmann::json embedding_report_to_json(const EmbeddingReport& r) {
    return nlohmann::json{{"hom_residual", json_value(r.hom_residual)},
                          {"duality_residual", json_value(r.duality_residual)},
                          {"gram_min_eig", json_value(r.gram_min_eig)},
                          {"D_preservation_max_err", json_value(r.d_preservation_max_err)},
                          {"SRR_preservation_max_err", json_value(r.srr_preservation_max_err)},
                          {"H_shift_observed", json_value(r.h_shift_observed)},
                          {"trials", r.trials}};
}

inline nlohmann::json channel_report_to_json(const ChannelReport& r) {
    return nlohmann::json{{"tp_residual", json_value(r.tp_residual)},
                          {"positivity_min_eig", json_value(r.positivity_min_eig)},
                          {"unit_preserved_residual", json_value(r.unit_preserved_residual)},
                          {"cp_ancilla_min_eig", json_value(r.cp_ancilla_min_eig)},
                          {"trials", r.trials}};
}

}  // namespace eja
