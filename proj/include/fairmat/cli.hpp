#pragma once

#include <algorithm>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fairmat/certificates.hpp"
#include "fairmat/impossibility.hpp"
#include "fairmat/instances.hpp"
#include "fairmat/io.hpp"
#include "fairmat/mechanisms.hpp"
#include "fairmat/sdrel.hpp"
#include "fairmat/verify.hpp"

namespace fairmat::cli {

enum ExitCode : int { Ok = 0, CheckFailed = 2, BadInput = 3, Usage = 64 };

using io::json;

namespace detail {

inline Instance load_instance(const std::string& path) {
    Instance inst = io::instance_from(io::read_json_file(path));
    const auto problems = validate_instance(inst);
    if (!problems.empty()) throw InvalidInstance(problems.front());
    return inst;
}

/// Accepts a bare lottery or any object carrying one under "lottery".
inline Lottery load_lottery(const Instance& inst, const std::string& path) {
    const json j = io::read_json_file(path);
    Lottery lottery = io::lottery_from(inst, j.contains("lottery") ? j.at("lottery") : j);
    const auto problems = validate_lottery(inst, lottery);
    if (!problems.empty()) throw InvalidInstance(problems.front());
    return lottery;
}

inline FractionalAssignment load_pi(const Instance& inst, const std::string& path) {
    FractionalAssignment pi = io::pi_from(io::read_json_file(path));
    if (pi.agents() != inst.n || pi.items() != inst.m()) throw InvalidInstance("assignment shape does not match instance");
    return pi;
}

inline json check_entry(const std::string& name, bool pass, json detail = json::object()) {
    json j{{"check", name}, {"pass", pass}};
    if (!detail.empty()) j["detail"] = std::move(detail);
    return j;
}

inline json efficiency_check(const Instance& inst, const FractionalAssignment& pi) {
    const auto r = is_sd_efficient(inst, pi);
    json d;
    if (!r.efficient) d["dominated_by"] = io::pi_json(*r.dominating)["pi"];
    return check_entry("efficiency", r.efficient, d);
}

inline json envy_report_json(const Instance& inst, const EnvyReport& report) {
    json v = json::array();
    for (const auto* p : report.violations())
        v.push_back({{"envier", p->envier},
                     {"envied", p->envied},
                     {"item", inst.items[*p->witness].label},
                     {"own", to_string(p->lhs)},
                     {"other", to_string(p->rhs)}});
    return v;
}

/// Lottery-level check when a lottery is known; otherwise the exact
/// fractional form for identical constraints, or the matroid sufficient
/// condition backed by a decomposition when it does not hold.
inline json envy_check(const Instance& inst, const FractionalAssignment& pi, const std::optional<Lottery>& lottery) {
    if (lottery) {
        const auto r = is_sd_envy_free(inst, *lottery);
        return check_entry("envy", r.all_satisfied(), {{"method", "lottery"}, {"violations", envy_report_json(inst, r)}});
    }
    if (identical_constraints(inst)) {
        const auto r = is_sd_envy_free_fractional(inst, pi);
        return check_entry("envy", r.all_satisfied(), {{"method", "fractional"}, {"violations", envy_report_json(inst, r)}});
    }
    if (all_matroids(inst) && all_hold(ef_sufficient_matroid(inst, pi)))
        return check_entry("envy", true, {{"method", "matroid-sufficient"}});
    const Lottery decomposition = decompose(inst, pi);
    const auto r = is_sd_envy_free(inst, decomposition);
    return check_entry("envy", r.all_satisfied(),
                       {{"method", "lottery-of-decomposition"}, {"violations", envy_report_json(inst, r)}});
}

inline json proportionality_check(const Instance& inst, const FractionalAssignment& pi) {
    const auto agents = sd_proportional_agents(inst, pi);
    json failing = json::array();
    for (std::size_t i = 0; i < agents.size(); ++i)
        if (!agents[i]) failing.push_back(i);
    return check_entry("proportionality", failing.empty(), {{"failing_agents", failing}});
}

inline json feasibility_check(const Instance& inst, const FractionalAssignment& pi) {
    const auto r = check_feasible(inst, pi);
    json d;
    if (r.feasible) {
        d["decomposition"] = io::lottery_json(inst, *r.decomposition);
    } else {
        d["separation"] = {{"y", io::pi_json(r.separation->y)["pi"]}, {"y0", to_string(r.separation->y0)}};
    }
    return check_entry("feasibility", r.feasible, d);
}

inline json run_checks(const Instance& inst, const FractionalAssignment& pi, const std::optional<Lottery>& lottery,
                       const std::vector<std::string>& checks) {
    json out = json::array();
    for (const auto& c : checks) {
        if (c == "efficiency") out.push_back(efficiency_check(inst, pi));
        else if (c == "envy") out.push_back(envy_check(inst, pi, lottery));
        else if (c == "proportionality") out.push_back(proportionality_check(inst, pi));
        else if (c == "feasibility") out.push_back(feasibility_check(inst, pi));
    }
    return out;
}

inline bool all_pass(const json& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c.at("pass").get<bool>(); });
}

// Human rendering of the same JSON the machine mode prints.

inline void render_matrix(std::ostream& out, const json& rows, const std::string& indent) {
    std::size_t width = 1;
    for (const auto& r : rows)
        for (const auto& v : r) width = std::max(width, v.get<std::string>().size());
    for (const auto& r : rows) {
        out << indent;
        for (const auto& v : r) {
            const std::string s = v.get<std::string>();
            out << std::string(width - s.size() + 1, ' ') << s;
        }
        out << '\n';
    }
}

inline bool is_matrix(const json& j) {
    return j.is_array() && !j.empty() && std::all_of(j.begin(), j.end(), [](const json& r) {
               return r.is_array() && std::all_of(r.begin(), r.end(), [](const json& v) { return v.is_string(); });
           }) && j.front().size() > 0;
}

inline void render(std::ostream& out, const json& j, const std::string& indent = "") {
    for (const auto& [key, value] : j.items()) {
        if (key == "checks") {
            for (const auto& c : value) {
                out << indent << c.at("check").get<std::string>() << ": " << (c.at("pass").get<bool>() ? "pass" : "FAIL");
                if (c.contains("detail") && c["detail"].contains("method"))
                    out << " (" << c["detail"]["method"].get<std::string>() << ")";
                out << '\n';
                if (c.contains("detail")) {
                    json rest = c["detail"];
                    rest.erase("method");
                    render(out, rest, indent + "  ");
                }
            }
        } else if (is_matrix(value)) {
            out << indent << key << ":\n";
            render_matrix(out, value, indent + " ");
        } else if (value.is_object()) {
            out << indent << key << ":\n";
            render(out, value, indent + "  ");
        } else if (value.is_array() && !value.empty() && value.front().is_object()) {
            out << indent << key << ": " << value.size() << " entries\n";
            for (const auto& v : value) {
                out << indent << "  -\n";
                render(out, v, indent + "    ");
            }
        } else if (value.is_string()) {
            out << indent << key << ": " << value.get<std::string>() << '\n';
        } else {
            out << indent << key << ": " << value.dump() << '\n';
        }
    }
}

inline std::vector<std::int64_t> parse_values(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw InvalidInstance("bad value '" + part + "' in --values");
        }
    }
    return out;
}

/// Re-checks every certificate of a file: a bundle with "instance" and
/// "certificates", or a single certificate carrying "instance".
inline json check_certificate_file(const std::string& path, bool& ok) {
    const json j = io::read_json_file(path);
    if (!j.contains("instance")) throw ParseError("certificate file has no instance");
    const Instance inst = io::instance_from(j.at("instance"));
    std::vector<cert::Certificate> certs;
    if (j.contains("certificates"))
        for (const auto& c : j.at("certificates")) certs.push_back(cert::from_json(inst, c));
    else
        certs.push_back(cert::from_json(inst, j));
    json results = json::array();
    ok = true;
    const cert::SupportRestriction* sr = nullptr;
    const cert::LotteryFarkas* farkas = nullptr;
    for (const auto& c : certs) {
        const auto r = cert::check(inst, c);
        ok = ok && r.ok;
        json e{{"kind", cert::kind_name(c)}, {"ok", r.ok}};
        if (!r.ok) e["reason"] = r.reason;
        results.push_back(e);
        if (const auto* p = std::get_if<cert::SupportRestriction>(&c)) sr = p;
        if (const auto* p = std::get_if<cert::LotteryFarkas>(&c)) farkas = p;
    }
    json out{{"file", path}, {"certificates", results}};
    if (sr && farkas) {
        const auto r = cert::check_nonexistence(inst, *sr, *farkas);
        out["nonexistence"] = r.ok;
        ok = ok && r.ok;
    }
    out["ok"] = ok;
    return out;
}

}  // namespace detail

/// Runs one command line (without the program name). Returns the exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Exact sd-efficient and sd-envy-free random assignment under constraints", "fairmat"};
    app.require_subcommand(1, 1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Machine-readable output");

    std::string instance_path, pi_path, lottery_path, emit_path, id, values, target, cert_path;
    std::string mechanism;
    bool do_decompose = false, do_verify = false, list = false;
    std::vector<std::string> checks;
    std::size_t samples = 1000, agents = 3;
    std::uint64_t seed = 20240601;

    auto* solve = app.add_subcommand("solve", "Run a mechanism");
    solve->add_option("--mechanism", mechanism)
        ->required()
        ->check(CLI::IsMember({"two-agent", "eating", "rotation", "naive-ps", "anonymous"}));
    solve->add_option("--instance", instance_path)->required();
    solve->add_flag("--decompose", do_decompose, "Attach an exact lottery");
    solve->add_flag("--verify", do_verify, "Re-run efficiency, envy and feasibility checks");

    auto* verify = app.add_subcommand("verify", "Check a fractional assignment");
    verify->add_option("--instance", instance_path)->required();
    verify->add_option("--pi", pi_path)->required();
    verify->add_option("--lottery", lottery_path);
    verify->add_option("--checks", checks)
        ->required()
        ->delimiter(',')
        ->check(CLI::IsMember({"efficiency", "envy", "proportionality", "feasibility"}));

    auto* decomp = app.add_subcommand("decompose", "Decompose a point of P into a lottery");
    decomp->add_option("--instance", instance_path)->required();
    decomp->add_option("--pi", pi_path)->required();

    auto* gal = app.add_subcommand("gallery", "Built-in instances");
    auto* list_opt = gal->add_flag("--list", list);
    auto* id_opt = gal->add_option("--id", id);
    gal->add_option("--emit", emit_path)->needs(id_opt);
    list_opt->excludes(id_opt);

    auto* reduce = app.add_subcommand("reduce-partition", "PARTITION to two identical budget agents");
    reduce->add_option("--values", values)->required();
    reduce->add_option("--emit", emit_path);

    auto* certify = app.add_subcommand("certify", "Produce impossibility certificates");
    certify->add_option("--target", target)->required()->check(CLI::IsMember({"thm4", "thm5"}));
    auto* samples_opt = certify->add_option("--samples", samples)->check(CLI::PositiveNumber);
    auto* seed_opt = certify->add_option("--seed", seed);
    auto* agents_opt = certify->add_option("--agents", agents)->check(CLI::Range(3, 8));
    certify->add_option("--emit", emit_path);

    auto* check_cert = app.add_subcommand("check-certificate", "Re-check a certificate file");
    check_cert->add_option("--file", cert_path)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (gal->parsed() && !list && id_opt->count() == 0) throw CLI::ValidationError("gallery needs --list or --id");
        if (certify->parsed() && target == "thm4" && (samples_opt->count() || seed_opt->count() || agents_opt->count()))
            throw CLI::ValidationError("--samples, --seed and --agents apply to thm5 only");
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return Usage;
    }

    json result;
    int code = Ok;
    try {
        if (solve->parsed()) {
            const Instance inst = detail::load_instance(instance_path);
            MechanismResult r;
            json extra;
            if (mechanism == "two-agent") r = mech_two_agent(inst);
            else if (mechanism == "eating") r = mech_eating(inst);
            else if (mechanism == "rotation") r = mech_rotation(inst);
            else if (mechanism == "naive-ps") r = mech_naive_ps(inst);
            else {
                const auto a = mech_anonymous(inst);
                r = a.result;
                extra = {{"objective", a.solver.objective}, {"gap", a.solver.gap}, {"iterations", a.solver.iterations}};
            }
            result["mechanism"] = r.mechanism;
            result["pi"] = io::pi_json(r.pi)["pi"];
            if (!r.parameters.empty()) result["parameters"] = r.parameters;
            if (!extra.empty()) result["solver"] = extra;
            json declared = json::array();
            for (auto g : r.guarantees) declared.push_back(to_string(g));
            result["declared"] = declared;
            std::optional<Lottery> lottery = r.lottery;
            if (do_decompose && !lottery) lottery = decompose(inst, r.pi);
            if (lottery) result["lottery"] = io::lottery_json(inst, *lottery);
            if (do_verify) {
                std::vector<std::string> wanted{"feasibility", "efficiency", "envy"};
                if (mechanism == "two-agent") wanted.push_back("proportionality");
                result["checks"] = detail::run_checks(inst, r.pi, lottery, wanted);
                if (!detail::all_pass(result["checks"])) code = CheckFailed;
            }
        } else if (verify->parsed()) {
            const Instance inst = detail::load_instance(instance_path);
            const FractionalAssignment pi = detail::load_pi(inst, pi_path);
            std::optional<Lottery> lottery;
            if (!lottery_path.empty()) {
                lottery = detail::load_lottery(inst, lottery_path);
                if (induced_fractional(inst, *lottery) != pi) throw InvalidInstance("lottery does not induce the given pi");
            }
            result["pi"] = io::pi_json(pi)["pi"];
            result["checks"] = detail::run_checks(inst, pi, lottery, checks);
            if (!detail::all_pass(result["checks"])) code = CheckFailed;
        } else if (decomp->parsed()) {
            const Instance inst = detail::load_instance(instance_path);
            const FractionalAssignment pi = detail::load_pi(inst, pi_path);
            const auto r = check_feasible(inst, pi);
            result["pi"] = io::pi_json(pi)["pi"];
            result["feasible"] = r.feasible;
            if (r.feasible) {
                result["lottery"] = io::lottery_json(inst, *r.decomposition);
            } else {
                result["certificate"] = cert::to_json(inst, cert::Separation{pi, r.separation->y, r.separation->y0});
                code = BadInput;
            }
        } else if (gal->parsed()) {
            if (list) {
                json entries = json::array();
                for (const auto& g : gallery_ids()) entries.push_back({{"id", g}, {"notes", gallery(g).notes}});
                result["gallery"] = entries;
            } else {
                const auto entry = gallery(id);
                result["id"] = entry.id;
                result["notes"] = entry.notes;
                if (!emit_path.empty()) {
                    io::write_json_file(emit_path, io::instance_json(entry.instance));
                    result["written"] = emit_path;
                } else {
                    result["instance"] = io::instance_json(entry.instance);
                }
            }
        } else if (reduce->parsed()) {
            const Instance inst = build_partition_reduction(detail::parse_values(values));
            FractionalAssignment half(2, inst.m());
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t e = 0; e < inst.m(); ++e) half(i, e) = make_rational(1, 2);
            result["half_feasible"] = check_feasible(inst, half).feasible;
            if (!emit_path.empty()) {
                io::write_json_file(emit_path, io::instance_json(inst));
                result["written"] = emit_path;
            } else {
                result["instance"] = io::instance_json(inst);
            }
        } else if (certify->parsed()) {
            json bundle;
            bool ok = false;
            if (target == "thm4") {
                const auto c = certify_thm4_nonexistence();
                bundle = thm4_bundle_json(c);
                ok = cert::check_nonexistence(c.instance, c.support, c.infeasibility).ok && c.forced_rows_implied;
                result["support_restriction"] = c.support.dominated.size();
                result["lp_variables"] = c.infeasibility.variables.size();
                result["forced_rows_implied"] = c.forced_rows_implied;
            } else {
                const auto r = certify_thm5_sampling(samples, seed, agents);
                bundle = thm5_bundle_json(r);
                const Instance inst = thm5_for(agents);
                ok = r.all_certified() && r.bounds_confirmed;
                for (const auto& c : r.vertex_certificates) ok = ok && cert::check(inst, c).ok;
                for (const auto& c : r.sample_certificates) ok = ok && cert::check(inst, c).ok;
                for (const char* k : {"status", "agents", "samples", "seed", "dimension", "vertices", "undominated", "bounds",
                                      "parametric_mismatches", "directions"})
                    result[k] = bundle[k];
            }
            result["target"] = target;
            result["certified"] = ok;
            if (!emit_path.empty()) {
                io::write_json_file(emit_path, bundle);
                result["written"] = emit_path;
            } else if (as_json) {
                result["bundle"] = bundle;
            }
            if (!ok) code = CheckFailed;
        } else if (check_cert->parsed()) {
            bool ok = false;
            result = detail::check_certificate_file(cert_path, ok);
            if (!ok) code = CheckFailed;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (as_json) out << json{{"error", e.what()}}.dump(2) << '\n';
        return BadInput;
    }

    if (as_json) out << result.dump(2) << '\n';
    else detail::render(out, result);
    return code;
}

inline int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args);
}

}  // namespace fairmat::cli
