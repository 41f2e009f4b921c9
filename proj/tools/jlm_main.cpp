// Command-line front end: run the full inverse-problem pipeline on a system
// definition, list or batch-run the built-in catalog, or classify the force
// family admitted by a prescribed multiplier profile.
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jlm/catalog.hpp"
#include "jlm/numverify.hpp"
#include "jlm/report.hpp"
#include "jlm/sysfile.hpp"

namespace {

constexpr int kExitParse = 1;
constexpr int kExitIo = 5;

struct OutputOptions {
    std::string out_path;  // empty = stdout
    std::string format = "json";
};

int emit(const jlm::Json& rep, const OutputOptions& oo) {
    std::string body =
        oo.format == "text" ? jlm::render_text(rep) : rep.dump(2) + "\n";
    if (oo.out_path.empty()) {
        std::cout << body;
        return 0;
    }
    std::ofstream f(oo.out_path, std::ios::binary);
    if (!f || !(f << body) || !f.flush()) {
        std::cerr << "error: cannot write " << oo.out_path << "\n";
        return kExitIo;
    }
    return 0;
}

std::string catalog_text(const jlm::Json& rep) {
    std::ostringstream os;
    for (const jlm::Json& r : rep["results"]) os << jlm::render_text(r) << "\n";
    const jlm::Json& s = rep["summary"];
    os << "ran " << s["ran"].get<int>() << " of " << s["total"].get<int>() << " entries, "
       << s["passed"].get<int>() << " passed, " << s["failed"].get<int>() << " failed\n";
    return os.str();
}

jlm::SystemFile resolve_target(const std::string& target) {
    if (std::filesystem::exists(target)) return jlm::load_system_file(target);
    if (jlm::catalog_find(target)) return jlm::catalog_load(target);
    throw jlm::IoError("'" + target + "' is neither a file nor a catalog entry (see `" +
                       "catalog list`)");
}

int write_csv(const std::string& path, const jlm::SystemFile& sf,
              const jlm::PipelineOptions& opt) {
    if (sf.initial.empty()) {
        std::cerr << "error: --csv needs an initial state in the system definition\n";
        return kExitParse;
    }
    jlm::FirstOrderSystem sys = jlm::build_system(sf);
    std::vector<double> init;
    for (const auto& s : sf.initial) init.push_back(jlm::number_of(s));
    double t0 = sf.t0 ? jlm::number_of(*sf.t0) : 0.0;
    double span = opt.tspan.value_or(sf.tspan ? jlm::number_of(*sf.tspan) : 1.0);
    double h = opt.h.value_or(1e-3);
    auto steps = static_cast<std::size_t>(std::llround(span / h));
    jlm::Bindings params = jlm::parameter_values(sys, opt.seed);
    jlm::Trajectory tr = jlm::rk4_integrate(sys, init, t0, h, steps, params);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot write " << path << "\n";
        return kExitIo;
    }
    f << sys.time();
    for (const auto& s : sys.states()) f << "," << s;
    f << "\n";
    f.precision(17);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        f << tr.times[k];
        for (double v : tr.states[k]) f << "," << v;
        f << "\n";
    }
    if (!f.flush()) {
        std::cerr << "error: cannot write " << path << "\n";
        return kExitIo;
    }
    return 0;
}

void add_common_flags(CLI::App* cmd, jlm::PipelineOptions& opt, OutputOptions& oo) {
    cmd->set_help_flag("--help", "print help and exit");
    cmd->add_option("--out", oo.out_path, "write the report to this file instead of stdout");
    cmd->add_option("--format", oo.format, "report format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();
    cmd->add_option("--seed", opt.seed, "seed for all randomized sampling")
        ->capture_default_str();
    cmd->add_option("--tolerance-numeric", opt.tolerance,
                    "relative tolerance for numeric equivalence checks")
        ->capture_default_str();
    cmd->add_flag("--timing", opt.timing, "include wall-clock timing in the report");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "inverse variational toolkit: Jacobi multipliers, affine Lagrangians, canonical "
        "Hamiltonians, and their verification for first-order systems"};
    app.require_subcommand(1);
    // --h is a documented option, so help lives on --help only
    app.set_help_flag("--help", "print help and exit");

    // ---- pipeline -------------------------------------------------------
    jlm::PipelineOptions popt;
    OutputOptions pout;
    std::string target;
    std::string csv_path;
    double h_arg = 0.0, tspan_arg = 0.0;
    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "run multiplier search, construction and verification on one system");
    pipeline->add_option("target", target, "system-definition file or catalog entry name")
        ->required();
    add_common_flags(pipeline, popt, pout);
    pipeline->add_flag("--all-families", popt.all_families,
                       "report every multiplier family that succeeds, not just the first");
    CLI::Option* oh =
        pipeline->add_option("--h", h_arg, "integration step for the numeric checks");
    CLI::Option* ots =
        pipeline->add_option("--tspan", tspan_arg, "integration span for the numeric checks");
    pipeline->add_option("--csv", csv_path,
                         "also export the reference trajectory as CSV to this path");

    // ---- catalog --------------------------------------------------------
    CLI::App* catalog = app.add_subcommand("catalog", "built-in example systems");
    catalog->require_subcommand(1);
    CLI::App* cat_list = catalog->add_subcommand("list", "list catalog entries");
    OutputOptions lout;
    cat_list->add_option("--out", lout.out_path, "write the listing to this file");
    cat_list->add_option("--format", lout.format, "listing format")
        ->check(CLI::IsMember({"json", "text"}))
        ->capture_default_str();

    jlm::PipelineOptions ropt;
    OutputOptions rout;
    std::vector<std::string> extra_files;
    double rh_arg = 0.0, rtspan_arg = 0.0;
    CLI::App* cat_run = catalog->add_subcommand("run-all", "run the pipeline on every entry");
    add_common_flags(cat_run, ropt, rout);
    cat_run->add_flag("--all-families", ropt.all_families,
                      "report every multiplier family that succeeds");
    CLI::Option* roh = cat_run->add_option("--h", rh_arg, "integration step override");
    CLI::Option* rots = cat_run->add_option("--tspan", rtspan_arg, "integration span override");
    cat_run->add_option("--extra", extra_files,
                        "additional system-definition files to append to the run");

    // ---- classify -------------------------------------------------------
    jlm::PipelineOptions copt;
    OutputOptions cout_opts;
    std::string shape, mu_text;
    CLI::App* classify = app.add_subcommand(
        "classify", "derive the force family admitting a multiplier of a given shape");
    classify->add_option("shape", shape,
                         "multiplier shape: mu-constant, mu-of-t, mu-of-x, mu-of-v, mu-of-tx, "
                         "product-a(t)b(v)")
        ->required();
    classify->add_option("mu", mu_text, "multiplier expression in (t, x, v)")->required();
    add_common_flags(classify, copt, cout_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // CLI11 prints usage; --help exits 0
    }

    try {
        if (pipeline->parsed()) {
            if (*oh) popt.h = h_arg;
            if (*ots) popt.tspan = tspan_arg;
            jlm::SystemFile sf = resolve_target(target);
            jlm::PipelineResult res = jlm::run_pipeline(sf, popt);
            int ec = emit(res.report, pout);
            if (ec != 0) return ec;
            if (!csv_path.empty() && !sf.doc_only) {
                ec = write_csv(csv_path, sf, popt);
                if (ec != 0) return ec;
            }
            return res.exit_code;
        }

        if (cat_list->parsed()) {
            jlm::Json rep;
            rep["schema"] = 1;
            rep["kind"] = "catalog";
            jlm::Json entries = jlm::Json::array();
            for (const auto& e : jlm::catalog()) {
                jlm::SystemFile sf = jlm::parse_system_file(e.text, "catalog:" + e.name);
                jlm::Json j;
                j["name"] = sf.name;
                j["description"] = sf.description;
                j["executable"] = !sf.doc_only;
                entries.push_back(std::move(j));
            }
            rep["entries"] = entries;
            if (lout.format == "text") {
                std::ostringstream os;
                for (const jlm::Json& j : entries)
                    os << (j["executable"].get<bool>() ? "  " : "* ")
                       << j["name"].get<std::string>() << " — "
                       << j["description"].get<std::string>() << "\n";
                os << "(* = documentation-only entry)\n";
                if (lout.out_path.empty()) {
                    std::cout << os.str();
                    return 0;
                }
                std::ofstream f(lout.out_path, std::ios::binary);
                if (!f || !(f << os.str())) {
                    std::cerr << "error: cannot write " << lout.out_path << "\n";
                    return kExitIo;
                }
                return 0;
            }
            return emit(rep, lout);
        }

        if (cat_run->parsed()) {
            if (*roh) ropt.h = rh_arg;
            if (*rots) ropt.tspan = rtspan_arg;
            std::vector<jlm::SystemFile> files;
            for (const auto& e : jlm::catalog())
                files.push_back(jlm::parse_system_file(e.text, "catalog:" + e.name));
            for (const auto& path : extra_files) files.push_back(jlm::load_system_file(path));

            std::vector<std::future<jlm::PipelineResult>> futures;
            futures.reserve(files.size());
            for (const auto& sf : files)
                futures.push_back(std::async(std::launch::async, [&sf, &ropt] {
                    return jlm::run_pipeline(sf, ropt);
                }));

            jlm::Json rep;
            rep["schema"] = 1;
            rep["kind"] = "catalog-run";
            jlm::Json results = jlm::Json::array();
            int exit_code = 0, ran = 0, passed = 0, failed = 0;
            for (auto& fut : futures) {
                jlm::PipelineResult r = fut.get();
                if (r.report["status"] != "documentation") {
                    ++ran;
                    if (r.exit_code == 0)
                        ++passed;
                    else
                        ++failed;
                }
                if (r.exit_code != 0 && exit_code == 0) exit_code = r.exit_code;
                results.push_back(std::move(r.report));
            }
            rep["results"] = std::move(results);
            jlm::Json summary;
            summary["total"] = static_cast<int>(files.size());
            summary["ran"] = ran;
            summary["passed"] = passed;
            summary["failed"] = failed;
            rep["summary"] = std::move(summary);
            if (rout.format == "text") {
                std::string body = catalog_text(rep);
                if (rout.out_path.empty()) {
                    std::cout << body;
                } else {
                    std::ofstream f(rout.out_path, std::ios::binary);
                    if (!f || !(f << body)) {
                        std::cerr << "error: cannot write " << rout.out_path << "\n";
                        return kExitIo;
                    }
                }
                return exit_code;
            }
            int ec = emit(rep, rout);
            return ec != 0 ? ec : exit_code;
        }

        if (classify->parsed()) {
            jlm::PipelineResult res = jlm::run_classify(shape, mu_text, copt);
            int ec = emit(res.report, cout_opts);
            return ec != 0 ? ec : res.exit_code;
        }
    } catch (const jlm::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const jlm::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return 0;
}
