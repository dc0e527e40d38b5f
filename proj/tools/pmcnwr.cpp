// pmcnwr: command-line front end for the parametric Markov chain
// analysis library. Subcommands cover model generation, equivalence
// collapse, value functions, derivative encodings, monotonicity /
// never-worse checks and format conversion.
//
// Exit codes: 0 success; 1 a check command returned refuted-no under
// --strict; 2 invalid input (bad files, flags, malformed models).

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nwr/benchgen.hpp"
#include "nwr/collapse.hpp"
#include "nwr/derivpmc.hpp"
#include "nwr/pmc.hpp"
#include "nwr/relations.hpp"
#include "nwr/valuefn.hpp"

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// All output is buffered and written in one step so that a failing
/// command never leaves a partial file behind.
void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

nwr::PMC load_model(const std::string& path) { return nwr::parse_model(read_input(path)); }

int verdict_exit(const nwr::Verdict& v, bool strict) {
    std::cout << nwr::verdict_to_json(v);
    return (strict && v.status == nwr::Status::RefutedNo) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parametric Markov chain collapse and monotonicity toolkit"};
    app.require_subcommand(1);

    // collapse
    std::string c_in, c_out = "-", c_report, c_name = "model";
    auto* collapse_cmd =
        app.add_subcommand("collapse", "preprocess and collapse equivalence classes");
    collapse_cmd->add_option("input", c_in, "model JSON ('-' for stdin)")->required();
    collapse_cmd->add_option("output", c_out, "collapsed model JSON ('-' for stdout)");
    collapse_cmd->add_option("--report", c_report, "write a JSON collapse report here");
    collapse_cmd->add_option("--name", c_name, "benchmark name used in the report line");

    // values
    std::string v_in;
    std::int64_t v_state = 0;
    auto* values_cmd = app.add_subcommand("values", "print symbolic value functions");
    values_cmd->add_option("input", v_in, "model JSON ('-' for stdin)")->required();
    values_cmd->add_option("--state", v_state, "print only this state (1-based)");

    // derivative
    std::string d_in, d_out = "-";
    std::uint32_t d_state = 1, d_param = 0;
    auto* deriv_cmd =
        app.add_subcommand("derivative", "build the derivative-encoding model");
    deriv_cmd->add_option("input", d_in, "model JSON ('-' for stdin)")->required();
    deriv_cmd->add_option("output", d_out, "output JSON ('-' for stdout)");
    deriv_cmd->add_option("--state", d_state, "state whose value is differentiated")
        ->required();
    deriv_cmd->add_option("--param", d_param, "parameter index (0-based)")->required();

    // check-mono
    std::string m_in, m_method = "sampling";
    std::uint32_t m_state = 1, m_param = 0;
    std::uint64_t m_budget = 1000, m_seed = 0;
    bool m_strict = false;
    auto* mono_cmd = app.add_subcommand("check-mono", "check monotonicity in a parameter");
    mono_cmd->add_option("input", m_in, "model JSON ('-' for stdin)")->required();
    mono_cmd->add_option("--state", m_state, "state to check")->required();
    mono_cmd->add_option("--param", m_param, "parameter index (0-based)")->required();
    mono_cmd->add_option("--method", m_method, "sampling | derivative-pmc | certificate")
        ->check(CLI::IsMember({"sampling", "derivative-pmc", "certificate"}));
    mono_cmd->add_option("--budget", m_budget, "sampling budget");
    mono_cmd->add_option("--seed", m_seed, "sampling seed");
    mono_cmd->add_flag("--strict", m_strict, "exit 1 on refuted-no");

    // check-nwr
    std::string n_in, n_gadget;
    std::uint32_t n_i = 1, n_j = 1;
    std::uint64_t n_budget = 1000, n_seed = 0;
    bool n_strict = false;
    auto* nwr_cmd = app.add_subcommand("check-nwr", "check the never-worse relation i -> j");
    nwr_cmd->add_option("input", n_in, "model JSON ('-' for stdin)")->required();
    nwr_cmd->add_option("--i", n_i, "left state")->required();
    nwr_cmd->add_option("--j", n_j, "right state")->required();
    nwr_cmd->add_option("--budget", n_budget, "sampling budget");
    nwr_cmd->add_option("--seed", n_seed, "sampling seed");
    nwr_cmd->add_option("--gadget-out", n_gadget,
                        "also write the monotonicity reduction gadget model here");
    nwr_cmd->add_flag("--strict", n_strict, "exit 1 on refuted-no");

    // gen-bench
    std::string g_variant, g_out = "-";
    std::uint32_t g_n = 2;
    bool g_prism = false;
    auto* gen_cmd = app.add_subcommand("gen-bench", "generate a ladder benchmark instance");
    gen_cmd->add_option("--variant", g_variant, "A | B | C | D")->required();
    gen_cmd->add_option("--n", g_n, "size parameter (>= 2)")->required();
    gen_cmd->add_option("--out", g_out, "output path ('-' for stdout)");
    gen_cmd->add_flag("--prism", g_prism, "emit PRISM instead of JSON");

    // convert
    std::string x_in, x_out = "-", x_format = "json";
    auto* conv_cmd = app.add_subcommand("convert", "convert between JSON and PRISM");
    conv_cmd->add_option("input", x_in, "model JSON ('-' for stdin)")->required();
    conv_cmd->add_option("output", x_out, "output path ('-' for stdout)");
    conv_cmd->add_option("--format", x_format, "json | prism")
        ->check(CLI::IsMember({"json", "prism"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*collapse_cmd) {
            nwr::PMC pmc = load_model(c_in);
            auto [pre, qrep] = nwr::qualitative_preprocess(pmc);
            auto [small, rep] = nwr::collapse(pre);
            write_output(c_out, nwr::emit_model(small));
            if (!c_report.empty()) write_output(c_report, nwr::report_to_json(rep));
            std::cerr << c_name << ": " << pmc.n << " -> " << rep.size_after << " states ("
                      << rep.classes.size() << " classes)\n";
            return 0;
        }
        if (*values_cmd) {
            nwr::PMC pmc = load_model(v_in);
            auto g = nwr::value_functions(pmc);
            auto names = pmc.effective_param_names();
            std::ostringstream out;
            for (std::uint32_t i = 1; i <= pmc.n; ++i) {
                if (v_state != 0 && static_cast<std::int64_t>(i) != v_state) continue;
                out << "g_" << i << " = (" << g[i - 1].num.str(names) << ") / ("
                    << g[i - 1].den.str(names) << ")\n";
            }
            std::cout << out.str();
            return 0;
        }
        if (*deriv_cmd) {
            nwr::PMC pmc = load_model(d_in);
            nwr::DerivativePMC dp = nwr::derivative_pmc(pmc, d_state, d_param);
            write_output(d_out, nwr::derivative_pmc_to_json(dp));
            return 0;
        }
        if (*mono_cmd) {
            nwr::PMC pmc = load_model(m_in);
            nwr::MonoMethod method = m_method == "sampling" ? nwr::MonoMethod::Sampling
                                     : m_method == "certificate"
                                         ? nwr::MonoMethod::Certificate
                                         : nwr::MonoMethod::DerivativePmc;
            nwr::Verdict v =
                nwr::check_monotone(pmc, m_state, m_param, m_budget, m_seed, method);
            return verdict_exit(v, m_strict);
        }
        if (*nwr_cmd) {
            nwr::PMC pmc = load_model(n_in);
            if (!n_gadget.empty()) {
                nwr::NwrGadget g = nwr::nwr_gadget(pmc, n_i, n_j);
                write_output(n_gadget, nwr::emit_model(g.pmc));
            }
            nwr::Verdict v = nwr::check_nwr(pmc, n_i, n_j, n_budget, n_seed);
            return verdict_exit(v, n_strict);
        }
        if (*gen_cmd) {
            nwr::PMC pmc = nwr::generate({nwr::parse_variant(g_variant), g_n});
            write_output(g_out, g_prism ? nwr::emit_prism(pmc) : nwr::emit_model(pmc));
            return 0;
        }
        if (*conv_cmd) {
            nwr::PMC pmc = load_model(x_in);
            write_output(x_out, x_format == "prism" ? nwr::emit_prism(pmc)
                                                    : nwr::emit_model(pmc));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
