#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "qrv/catalog.hpp"
#include "qrv/json_io.hpp"
#include "qrv/l1norm.hpp"
#include "qrv/majorization.hpp"
#include "qrv/povm.hpp"
#include "qrv/property_suite.hpp"
#include "qrv/verify.hpp"

namespace qrv::cli {
namespace {

using json = nlohmann::json;

std::shared_ptr<spdlog::logger> logger() {
    auto log = spdlog::get("qrv");
    if (!log) {
        log = spdlog::stderr_logger_st("qrv");
        log->set_pattern("[%l] %v");
    }
    const char *env = std::getenv("QRV_LOG");
    log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return log;
}

struct Inputs {
    std::string povm, qrv, rho, space, f, g, certificate, order = "b", instances_dir;
    std::vector<std::string> only;
    double tol = 1e-6;
    double order_tol = 1e-9;
    std::uint64_t seed = 42;
    std::size_t trials = 200;
    bool list = false;
    std::string file;
};

std::optional<FiniteMeasureSpace> space_option(const Inputs &in) {
    if (in.space.empty()) {
        return std::nullopt;
    }
    return io::space_from_json(io::load_file(in.space), in.space);
}

void emit(const Inputs &in, const json &j, std::ostream &out) {
    if (!in.certificate.empty()) {
        io::save_file(in.certificate, j);
        logger()->info("wrote {}", in.certificate);
    }
    out << j.dump(2) << "\n";
}

int cmd_integrate(const Inputs &in, std::ostream &out) {
    const auto space = space_option(in);
    const Povm nu = io::povm_from_json(io::load_file(in.povm), space, in.povm);
    const auto f = io::qrv_from_json(io::load_file(in.qrv), nu.space(), in.qrv);
    json j;
    if (in.rho.empty()) {
        const auto v = integrate(f, nu);
        j = {{"integral", io::to_json(v)}, {"norm", operator_norm(v)}};
    } else {
        const State rho = io::state_from_json(io::load_file(in.rho), in.rho);
        const auto v = integrate(f, nu, rho);
        j = {{"integral", io::to_json(v)},
             {"norm", operator_norm(v)},
             {"induced_measure", induced_measure(nu, rho)}};
    }
    emit(in, j, out);
    return kOk;
}

int cmd_rn(const Inputs &in, std::ostream &out) {
    const Povm nu = io::povm_from_json(io::load_file(in.povm), space_option(in), in.povm);
    const State rho = io::state_from_json(io::load_file(in.rho), in.rho);
    const auto d = rn_derivative(nu, rho);
    std::vector<HermitianOperator> ops;
    for (std::size_t i = 0; i < d.size(); ++i) {
        ops.push_back(d[i]);
    }
    json j = {{"induced_measure", d.induced()}, {"derivative", io::atom_map(nu.space(), ops)},
              {"sup_norm", d.sup_norm()}};
    if (d.invertible()) {
        j["inverse_sup_norm"] = d.inverse_sup_norm();
    }
    emit(in, j, out);
    return kOk;
}

int cmd_norm1(const Inputs &in, std::ostream &out) {
    const Povm nu = io::povm_from_json(io::load_file(in.povm), space_option(in), in.povm);
    const auto f = io::qrv_from_json(io::load_file(in.qrv), nu.space(), in.qrv);
    L1Options opt;
    opt.tol = in.tol;
    const auto cert = l1_seminorm(f, nu, opt);
    logger()->info("seminorm {} gap {:.3e} after {} iterations", cert.value, cert.gap, cert.iterations);
    emit(in, io::l1_certificate_to_json(cert, nu, f, opt.tol), out);
    return cert.converged ? kOk : kStall;
}

int cmd_bracket(const Inputs &in, std::ostream &out) {
    const Povm nu = io::povm_from_json(io::load_file(in.povm), space_option(in), in.povm);
    const auto f = io::qrv_from_json(io::load_file(in.qrv), nu.space(), in.qrv);
    const auto g = io::classical_from_json(io::load_file(in.g), nu.space(), in.g);
    const auto v = bracket(f, g, nu);
    emit(in, {{"bracket", io::to_json(v)}, {"norm", operator_norm(v)}}, out);
    return kOk;
}

Order parse_order(const std::string &s) {
    if (s == "b") {
        return Order::B;
    }
    if (s == "t") {
        return Order::T;
    }
    return Order::S;
}

int cmd_majorize(const Inputs &in, std::ostream &out) {
    const auto space = space_option(in);
    const auto f = io::qrv_from_json(io::load_file(in.f), space, in.f);
    const auto g = io::qrv_from_json(io::load_file(in.g), f.space(), in.g);
    MajorizationOptions opt;
    opt.seed = in.seed;
    opt.tol = in.order_tol;
    MajorizationCertificate c;
    switch (parse_order(in.order)) {
    case Order::B: c = majorizes_B(f, g); break;
    case Order::T: c = majorizes_T(f, g, opt); break;
    case Order::S: c = majorizes_S(f, g, opt); break;
    }
    logger()->info("order {}: {}", to_string(c.order), to_string(c.verdict));
    emit(in, io::majorization_to_json(c, f, g), out);
    return c.verdict == Verdict::Disagreement ? kStall : kOk;
}

int cmd_separate(const Inputs &in, std::ostream &out) {
    const auto space = space_option(in);
    const auto f = io::qrv_from_json(io::load_file(in.f), space, in.f);
    const auto g = io::qrv_from_json(io::load_file(in.g), f.space(), in.g);
    const auto r = komiya_separate(f, g, in.seed);
    emit(in, io::separation_to_json(r, f, g), out);
    return kOk;
}

int cmd_examples(const Inputs &in, std::ostream &out, std::ostream &err) {
    const auto &all = catalog::examples();
    if (in.list) {
        for (const auto &e : all) {
            out << e.id << "  " << e.title << "\n";
        }
        return kOk;
    }
    std::vector<const catalog::Example *> chosen;
    for (const auto &id : in.only) {
        const auto *e = catalog::find(id);
        if (!e) {
            err << "error: unknown example '" << id << "' (see --list)\n";
            return kValidation;
        }
        chosen.push_back(e);
    }
    if (chosen.empty()) {
        for (const auto &e : all) {
            chosen.push_back(&e);
        }
    }
    std::size_t checks = 0;
    std::size_t failed = 0;
    for (const auto *e : chosen) {
        std::optional<json> doc;
        if (!in.instances_dir.empty()) {
            const auto path = std::filesystem::path(in.instances_dir) / (e->id + ".json");
            if (std::filesystem::exists(path)) {
                doc = io::load_file(path.string());
                logger()->info("{}: input from {}", e->id, path.string());
            }
        }
        out << e->id << ": " << e->title << "\n";
        for (const auto &c : e->run(doc)) {
            ++checks;
            failed += c.ok ? 0 : 1;
            out << (c.ok ? "  ok    " : "  FAIL  ") << c.name;
            if (!c.detail.empty()) {
                out << "  [" << c.detail << "]";
            }
            out << "\n";
        }
    }
    out << chosen.size() << " examples, " << checks << " checks, " << failed << " failed\n";
    return failed == 0 ? kOk : kMismatch;
}

int cmd_suite(const Inputs &in, std::ostream &out) {
    suite::Options opt;
    opt.seed = in.seed;
    opt.trials = in.trials;
    const auto r = suite::run(opt);
    out << suite::format(r);
    return r.violations() == 0 ? kOk : kFailure;
}

int cmd_verify(const Inputs &in, std::ostream &out) {
    const auto r = verify::check(io::load_file(in.file));
    out << verify::format(r);
    return r.ok() ? kOk : kValidation;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Operator-valued integration, L1 seminorm and majorization with certificates", "qrv"};
    app.require_subcommand(1);
    Inputs in;

    auto add_tol = [&](CLI::App *c) {
        c->add_option("--tol", in.tol, "relative gap target")->check(CLI::PositiveNumber)->capture_default_str();
    };
    auto add_seed = [&](CLI::App *c) { c->add_option("--seed", in.seed, "RNG seed")->capture_default_str(); };
    auto add_out = [&](CLI::App *c) { c->add_option("--certificate", in.certificate, "also write the JSON here"); };
    auto add_space = [&](CLI::App *c) { c->add_option("--space", in.space, "measure space JSON")->check(CLI::ExistingFile); };

    auto *integrate_cmd = app.add_subcommand("integrate", "integral of f against a POVM");
    integrate_cmd->add_option("--povm", in.povm)->required()->check(CLI::ExistingFile);
    integrate_cmd->add_option("--qrv", in.qrv)->required()->check(CLI::ExistingFile);
    integrate_cmd->add_option("--rho", in.rho, "full-rank state; integrate through the density")
        ->check(CLI::ExistingFile);
    add_space(integrate_cmd);
    add_out(integrate_cmd);

    auto *rn_cmd = app.add_subcommand("rn", "density of a POVM against its induced scalar measure");
    rn_cmd->add_option("--povm", in.povm)->required()->check(CLI::ExistingFile);
    rn_cmd->add_option("--rho", in.rho)->required()->check(CLI::ExistingFile);
    add_space(rn_cmd);
    add_out(rn_cmd);

    auto *norm_cmd = app.add_subcommand("norm1", "L1 seminorm with primal and dual certificate");
    norm_cmd->add_option("--povm", in.povm)->required()->check(CLI::ExistingFile);
    norm_cmd->add_option("--qrv", in.qrv)->required()->check(CLI::ExistingFile);
    add_tol(norm_cmd);
    add_space(norm_cmd);
    add_out(norm_cmd);

    auto *bracket_cmd = app.add_subcommand("bracket", "<f, g I> for a scalar function g");
    bracket_cmd->add_option("--povm", in.povm)->required()->check(CLI::ExistingFile);
    bracket_cmd->add_option("--qrv", in.qrv)->required()->check(CLI::ExistingFile);
    bracket_cmd->add_option("--g", in.g, "scalar function JSON")->required()->check(CLI::ExistingFile);
    add_space(bracket_cmd);
    add_out(bracket_cmd);

    auto *maj_cmd = app.add_subcommand("majorize", "decide whether f is majorized by g");
    maj_cmd->add_option("--order", in.order)->check(CLI::IsMember({"b", "t", "s"}))->capture_default_str();
    maj_cmd->add_option("--f", in.f)->required()->check(CLI::ExistingFile);
    maj_cmd->add_option("--g", in.g)->required()->check(CLI::ExistingFile);
    add_space(maj_cmd);
    add_seed(maj_cmd);
    maj_cmd->add_option("--tol", in.order_tol, "relative slack for scalar comparisons")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_out(maj_cmd);

    auto *sep_cmd = app.add_subcommand("separate", "search for a functional separating f from the orbit of g");
    sep_cmd->add_option("--f", in.f)->required()->check(CLI::ExistingFile);
    sep_cmd->add_option("--g", in.g)->required()->check(CLI::ExistingFile);
    add_space(sep_cmd);
    add_seed(sep_cmd);
    add_out(sep_cmd);

    auto *ex_cmd = app.add_subcommand("paper-examples", "reference examples against their known values");
    ex_cmd->add_flag("--list", in.list, "print example ids");
    ex_cmd->add_option("--only", in.only, "run only these ids");
    ex_cmd->add_option("--instances", in.instances_dir, "directory of <id>.json input overrides")
        ->check(CLI::ExistingDirectory);

    auto *suite_cmd = app.add_subcommand("property-suite", "seeded random checks of the norm inequalities");
    add_seed(suite_cmd);
    suite_cmd->add_option("--trials", in.trials)->capture_default_str();

    auto *verify_cmd = app.add_subcommand("verify", "re-check a certificate file");
    verify_cmd->add_option("file", in.file)->required()->check(CLI::ExistingFile);

    std::vector<std::string> argv_store{"qrv"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char *> argv;
    for (auto &s : argv_store) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*integrate_cmd) return cmd_integrate(in, out);
        if (*rn_cmd) return cmd_rn(in, out);
        if (*norm_cmd) return cmd_norm1(in, out);
        if (*bracket_cmd) return cmd_bracket(in, out);
        if (*maj_cmd) return cmd_majorize(in, out);
        if (*sep_cmd) return cmd_separate(in, out);
        if (*ex_cmd) return cmd_examples(in, out, err);
        if (*suite_cmd) return cmd_suite(in, out);
        if (*verify_cmd) return cmd_verify(in, out);
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::SolverStall ? kStall : kValidation;
    } catch (const nlohmann::json::exception &e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
    return kValidation;
}

} // namespace qrv::cli
