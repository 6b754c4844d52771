// Command-line driver: parses algebra/state specs from config files, runs
// axiom checks, entropy evaluations, embedding verifications, Stein scans and
// the pinching demo, and emits CSV/JSON results suitable for plotting.
//
// Exit codes: 0 ok, 1 invariant failure, 2 parse error, 3 budget exceeded,
// 4 unsupported operation.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "eja/eja.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Options {
    std::string command;
    std::string algebra;
    std::string config_path;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::size_t budget = eja::kDefaultBudget;
    int trials = 0;  // 0: use the config value or the command default
    bool bits = false;
    bool tol_given = false;
};

double out_scale(const Options& opt) { return opt.bits ? 1.0 / std::log(2.0) : 1.0; }

// Flat key-value text with [sections]; '#' starts a comment.
class Config {
  public:
    void parse(const std::string& text) {
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = eja::detail::strip(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = eja::detail::strip(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw eja::ParseError("config line " + std::to_string(lineno) +
                                      ": expected key = value");
            const std::string key = eja::detail::strip(line.substr(0, eq));
            const std::string value = eja::detail::strip(line.substr(eq + 1));
            if (key.empty()) throw eja::ParseError("config line " + std::to_string(lineno) +
                                                   ": empty key");
            sections_[section].emplace_back(key, value);
        }
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const {
        auto it = sections_.find(section);
        if (it == sections_.end()) return fallback;
        for (const auto& [k, v] : it->second)
            if (k == key) return v;
        return fallback;
    }

    const std::vector<std::pair<std::string, std::string>>& section(
        const std::string& name) const {
        static const std::vector<std::pair<std::string, std::string>> empty;
        auto it = sections_.find(name);
        return it == sections_.end() ? empty : it->second;
    }

  private:
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : eja::detail::split_top(s, ',')) {
        const std::string t = eja::detail::strip(part);
        if (t.empty()) continue;
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        } catch (const std::exception&) {
            throw eja::ParseError("invalid number in " + what + ": '" + t + "'");
        }
    }
    if (out.empty()) throw eja::ParseError("empty list for " + what);
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_double_list(s, what)) out.push_back(static_cast<int>(v));
    return out;
}

// State generators: coeffs(...), random_state(seed), mixture(w: name, ...),
// maximally_mixed().
std::map<std::string, eja::State> resolve_states(const Config& cfg, const eja::AlgebraPtr& alg,
                                                 double tol) {
    std::map<std::string, eja::State> states;
    for (const auto& [name, spec] : cfg.section("states")) {
        const std::string s = eja::detail::strip(spec);
        auto args_of = [&](const std::string& head) -> std::optional<std::string> {
            if (s.size() > head.size() + 1 && s.compare(0, head.size() + 1, head + "(") == 0 &&
                s.back() == ')')
                return s.substr(head.size() + 1, s.size() - head.size() - 2);
            return std::nullopt;
        };
        if (auto a = args_of("coeffs")) {
            const std::vector<double> v = parse_double_list(*a, "coeffs of " + name);
            if (static_cast<Eigen::Index>(v.size()) != alg->dim())
                throw eja::ParseError("state " + name + " has " + std::to_string(v.size()) +
                                      " coefficients, algebra dim is " +
                                      std::to_string(alg->dim()));
            Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(
                v.data(), static_cast<Eigen::Index>(v.size()));
            states.emplace(name, eja::make_state(alg->element(c), std::max(tol, 1e-8)));
        } else if (auto a = args_of("random_state")) {
            eja::Rng rng(static_cast<std::uint64_t>(std::stoull(eja::detail::strip(*a))));
            states.emplace(name, eja::random_state(alg, rng));
        } else if (auto a = args_of("mixture")) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(alg->dim());
            double wsum = 0.0;
            for (const auto& part : eja::detail::split_top(*a, ',')) {
                const auto colon = part.find(':');
                if (colon == std::string::npos)
                    throw eja::ParseError("mixture parts must be 'weight: name'");
                const double w = std::stod(eja::detail::strip(part.substr(0, colon)));
                const std::string ref = eja::detail::strip(part.substr(colon + 1));
                auto it = states.find(ref);
                if (it == states.end())
                    throw eja::ParseError("mixture of " + name + " references undefined state '" +
                                          ref + "'");
                acc += w * it->second.element.coeffs;
                wsum += w;
            }
            if (std::abs(wsum - 1.0) > 1e-6)
                throw eja::ParseError("mixture weights of " + name + " sum to " +
                                      std::to_string(wsum));
            states.emplace(name, eja::make_state(alg->element(acc), std::max(tol, 1e-8)));
        } else if (s == "maximally_mixed()") {
            states.emplace(name, eja::maximally_mixed(alg));
        } else {
            throw eja::ParseError("unrecognized state generator for " + name + ": '" + s + "'");
        }
    }
    return states;
}

const eja::State& named_state(const std::map<std::string, eja::State>& states,
                              const std::string& name) {
    auto it = states.find(name);
    if (it == states.end()) throw eja::ParseError("undefined state '" + name + "'");
    return it->second;
}

nlohmann::json metadata(const Options& opt, const std::string& config_text) {
    return nlohmann::json{
        {"tool_version", kToolVersion},
        {"config_hash",
         eja::fmt_double(0.0).empty()
             ? ""
             : std::to_string(eja::fnv1a(config_text + "|" + opt.algebra + "|" +
                                         std::to_string(opt.seed) + "|" + opt.format))},
        {"seed", opt.seed},
        {"tolerances",
         nlohmann::json{{"tol", opt.tol}, {"support_tol_factor", eja::kSupportTolFactor}}},
        {"units", opt.bits ? "bits" : "nats"}};
}

void write_output(const Options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw eja::Error("cannot open output file " + opt.out_path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << "\n";
}

// ---------------------------------------------------------------------------

int cmd_axioms(const Options& opt, const Config& cfg, const std::string& cfg_text) {
    const std::string spec = !opt.algebra.empty() ? opt.algebra : cfg.get("", "algebra");
    if (spec.empty()) throw eja::ParseError("axioms needs --algebra or a config algebra key");
    eja::AlgebraPtr alg = eja::build_algebra(spec, opt.budget);
    const int trials = opt.trials > 0 ? opt.trials : std::stoi(cfg.get("axioms", "trials", "100"));
    const eja::AxiomReport rep = eja::check_axioms(alg, trials, opt.tol, opt.seed);

    nlohmann::json j{{"meta", metadata(opt, cfg_text)},
                     {"algebra", alg->spec_string()},
                     {"report", eja::axiom_report_to_json(rep)}};
    const bool tensor = alg->kind() == eja::Kind::Tensor;
    const bool ok = rep.max_residual_j1 <= opt.tol && rep.max_residual_j2 <= opt.tol &&
                    rep.max_residual_j3 <= opt.tol;
    j["pass"] = tensor ? true : ok;
    write_output(opt, j.dump(2));
    return (tensor || ok) ? 0 : 1;
}

int cmd_entropy(const Options& opt, const Config& cfg, const std::string& cfg_text) {
    const std::string spec = !opt.algebra.empty() ? opt.algebra : cfg.get("", "algebra");
    if (spec.empty()) throw eja::ParseError("entropy needs an algebra");
    eja::AlgebraPtr alg = eja::build_algebra(spec, opt.budget);
    auto states = resolve_states(cfg, alg, opt.tol);
    const std::string pairs = cfg.get("entropy", "pairs", "rho:sigma");
    const std::vector<double> s_grid =
        parse_double_list(cfg.get("entropy", "s_grid", "0.25,0.5,1,2"), "s_grid");
    const double scale = out_scale(opt);

    nlohmann::json records = nlohmann::json::array();
    for (const auto& pair_spec : eja::detail::split_top(pairs, ',')) {
        const auto colon = pair_spec.find(':');
        if (colon == std::string::npos) throw eja::ParseError("pairs must be 'rho:sigma'");
        const std::string rn = eja::detail::strip(pair_spec.substr(0, colon));
        const std::string sn = eja::detail::strip(pair_spec.substr(colon + 1));
        const eja::State& rho = named_state(states, rn);
        const eja::State& sigma = named_state(states, sn);
        const std::string tag = rn + ":" + sn;

        auto rec = [&](const std::string& q, double s, double v) {
            nlohmann::json r = eja::entropy_record(q, s, v * scale);
            r["pair"] = tag;
            records.push_back(std::move(r));
        };
        rec("H_rho", 0.0, eja::vn_entropy(rho, opt.tol));
        rec("H_sigma", 0.0, eja::vn_entropy(sigma, opt.tol));
        rec("D", 0.0, eja::relative_entropy(rho, sigma, opt.tol));
        for (double s : s_grid) {
            rec("prr", s, eja::prr(rho, sigma, s, opt.tol));
            rec("srr", s, eja::srr(rho, sigma, s, opt.tol));
        }
    }
    nlohmann::json j{{"meta", metadata(opt, cfg_text)},
                     {"algebra", alg->spec_string()},
                     {"records", records}};
    write_output(opt, j.dump(2));
    return 0;
}

int cmd_stein(const Options& opt, const Config& cfg, const std::string& cfg_text) {
    const std::string spec = !opt.algebra.empty() ? opt.algebra : cfg.get("", "algebra");
    if (spec.empty()) throw eja::ParseError("stein needs an algebra");
    eja::AlgebraPtr alg = eja::build_algebra(spec, opt.budget);
    auto states = resolve_states(cfg, alg, opt.tol);
    const eja::State& rho = named_state(states, cfg.get("stein", "rho", "rho"));
    const eja::State& sigma = named_state(states, cfg.get("stein", "sigma", "sigma"));
    const double epsilon = std::stod(cfg.get("stein", "epsilon", "0.05"));
    const std::vector<int> n_list = parse_int_list(cfg.get("stein", "n_list", "1,2,3,4"), "n_list");
    const std::vector<double> s_grid = parse_double_list(
        cfg.get("stein", "s_grid", "-0.5,-0.25,-0.1,-0.05,-0.01"), "s_grid");

    for (int n : n_list) {
        double need = 1.0;
        for (int i = 0; i < n; ++i) need *= static_cast<double>(alg->dim());
        if (need > static_cast<double>(opt.budget))
            throw eja::BudgetError("n=" + std::to_string(n) + " needs " +
                                       eja::fmt_double(need) + " coefficients, budget is " +
                                       std::to_string(opt.budget),
                                   static_cast<std::size_t>(need));
    }

    const auto records = eja::stein_scan(rho, sigma, epsilon, n_list, s_grid, opt.budget, opt.tol);
    const double scale = out_scale(opt);

    if (opt.format == "csv") {
        std::string text;
        const nlohmann::json meta = metadata(opt, cfg_text);
        text += "# tool_version = " + std::string(kToolVersion) + "\n";
        text += "# config_hash = " + meta.at("config_hash").get<std::string>() + "\n";
        text += "# seed = " + std::to_string(opt.seed) + "\n";
        text += "# tol = " + eja::fmt_double(opt.tol) + "\n";
        text += "# units = " + std::string(opt.bits ? "bits" : "nats") + "\n";
        text += eja::stein_csv_header() + "\n";
        for (auto r : records) {
            r.pinched_rate *= scale;
            r.achievable_exponent *= scale;
            r.converse_bound *= scale;
            r.target *= scale;
            r.gap_bound *= scale;
            text += eja::stein_csv_row(r) + "\n";
        }
        write_output(opt, text);
    } else {
        nlohmann::json rows = nlohmann::json::array();
        for (auto r : records) {
            r.pinched_rate *= scale;
            r.achievable_exponent *= scale;
            r.converse_bound *= scale;
            r.target *= scale;
            r.gap_bound *= scale;
            rows.push_back(eja::stein_record_to_json(r));
        }
        nlohmann::json j{{"meta", metadata(opt, cfg_text)},
                         {"algebra", alg->spec_string()},
                         {"epsilon", epsilon},
                         {"records", rows}};
        write_output(opt, j.dump(2));
    }
    return 0;
}

int cmd_embed_check(const Options& opt, const Config& cfg, const std::string& cfg_text) {
    const std::string spec = !opt.algebra.empty() ? opt.algebra : cfg.get("", "algebra");
    if (spec.empty()) throw eja::ParseError("embed-check needs an algebra");
    eja::AlgebraPtr alg = eja::build_algebra(spec, opt.budget);
    const eja::Embedding emb = eja::canonical_embedding(alg);  // throws UnsupportedError for oct3
    const int trials = opt.trials > 0 ? opt.trials : std::stoi(cfg.get("embed", "trials", "50"));
    const std::vector<double> s_grid =
        parse_double_list(cfg.get("embed", "s_grid", "0.25,0.5,1,2"), "s_grid");
    const eja::EmbeddingReport rep = eja::verify_embedding(emb, trials, s_grid, opt.tol, opt.seed);

    const double gate = opt.tol_given ? opt.tol : 1e-8;
    const bool pass =
        rep.d_preservation_max_err <= gate && rep.srr_preservation_max_err <= gate;
    nlohmann::json j{{"meta", metadata(opt, cfg_text)},
                     {"algebra", alg->spec_string()},
                     {"embedding", emb.name},
                     {"target", emb.target->spec_string()},
                     {"report", eja::embedding_report_to_json(rep)},
                     {"pass", pass}};
    write_output(opt, j.dump(2));
    return pass ? 0 : 1;
}

int cmd_pinch_demo(const Options& opt, const Config& cfg, const std::string& cfg_text) {
    const std::string spec = !opt.algebra.empty() ? opt.algebra : cfg.get("", "algebra");
    if (spec.empty()) throw eja::ParseError("pinch-demo needs an algebra");
    eja::AlgebraPtr alg = eja::build_algebra(spec, opt.budget);
    auto states = resolve_states(cfg, alg, opt.tol);
    const eja::State& rho = named_state(states, cfg.get("pinch", "rho", "rho"));
    const eja::State& sigma = named_state(states, cfg.get("pinch", "sigma", "sigma"));

    const eja::State kappa = eja::pinch_by_state(sigma, rho, opt.tol);
    const eja::SpectralDecomposition sk = eja::spectral(kappa.element, opt.tol);
    const eja::Measurement I = eja::pinched_measurement(rho, sigma, std::nullopt, opt.tol);
    const eja::Distribution p = eja::measure(I, rho, 1e-8);
    const eja::Distribution q = eja::measure(I, sigma, 1e-8);
    const double lhs = eja::relative_entropy(kappa, sigma, opt.tol);
    const double rhs = eja::classical_relative(p, q);
    const double residual =
        (std::isinf(lhs) && std::isinf(rhs) && lhs == rhs) ? 0.0 : std::abs(lhs - rhs);
    const double scale = out_scale(opt);

    nlohmann::json eigs = nlohmann::json::array(), mults = nlohmann::json::array();
    for (double l : sk.eigenvalues) eigs.push_back(l);
    for (double m : sk.multiplicities) mults.push_back(m);
    nlohmann::json j{{"meta", metadata(opt, cfg_text)},
                     {"algebra", alg->spec_string()},
                     {"pinched_state_eigenvalues", eigs},
                     {"pinched_state_multiplicities", mults},
                     {"measurement_outcomes", I.effects.size()},
                     {"D_pinched_vs_sigma", eja::json_value(lhs * scale)},
                     {"classical_D_of_measured", eja::json_value(rhs * scale)},
                     {"identity_residual", eja::json_value(residual)}};
    write_output(opt, j.dump(2));
    return residual <= 1e-6 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"Euclidean Jordan algebra toolkit"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--algebra", opt.algebra, "algebra spec, e.g. spin:2 or tensor(spin:2;3)");
        sub->add_option("--config", opt.config_path, "config file (flat key = value with sections)");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--tol", opt.tol, "numeric tolerance");
        sub->add_option("--out", opt.out_path, "output file (stdout if omitted)");
        sub->add_option("--format", opt.format, "output format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--bits", opt.bits, "report entropic values in bits instead of nats");
        sub->add_option("--budget", opt.budget, "tensor coefficient budget");
        sub->add_option("--trials", opt.trials, "randomized trial count (axioms, embed-check)");
    };
    CLI::App* axioms = app.add_subcommand("axioms", "randomized Jordan-axiom residual report");
    CLI::App* entropy = app.add_subcommand("entropy", "entropies and divergences for state pairs");
    CLI::App* stein = app.add_subcommand("stein", "finite-n hypothesis-testing scan");
    CLI::App* embed = app.add_subcommand("embed-check", "canonical embedding verification");
    CLI::App* pinch = app.add_subcommand("pinch-demo", "pinched state and measurement identity");
    for (CLI::App* sub : {axioms, entropy, stein, embed, pinch}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    opt.tol_given = app.get_subcommands().front()->count("--tol") > 0;

    try {
        std::string cfg_text;
        if (!opt.config_path.empty()) {
            std::ifstream in(opt.config_path, std::ios::binary);
            if (!in) throw eja::ParseError("cannot read config file " + opt.config_path);
            std::ostringstream ss;
            ss << in.rdbuf();
            cfg_text = ss.str();
        }
        Config cfg;
        cfg.parse(cfg_text);
        if (opt.algebra.empty()) opt.algebra = cfg.get("", "algebra");
        if (!cfg.get("", "seed").empty() &&
            app.get_subcommands().front()->count("--seed") == 0)
            opt.seed = std::stoull(cfg.get("", "seed"));
        if (!cfg.get("", "tol").empty() && !opt.tol_given) {
            opt.tol = std::stod(cfg.get("", "tol"));
            opt.tol_given = true;
        }
        if (!cfg.get("", "budget").empty() &&
            app.get_subcommands().front()->count("--budget") == 0)
            opt.budget = std::stoull(cfg.get("", "budget"));

        if (axioms->parsed()) return cmd_axioms(opt, cfg, cfg_text);
        if (entropy->parsed()) return cmd_entropy(opt, cfg, cfg_text);
        if (stein->parsed()) return cmd_stein(opt, cfg, cfg_text);
        if (embed->parsed()) return cmd_embed_check(opt, cfg, cfg_text);
        if (pinch->parsed()) return cmd_pinch_demo(opt, cfg, cfg_text);
        return 2;
    } catch (const eja::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const eja::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const eja::UnsupportedError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 4;
    } catch (const eja::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
