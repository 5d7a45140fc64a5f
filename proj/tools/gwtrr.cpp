// gwtrr: evaluate twisted correlators, print generating functions, run the
// verification suites.

#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tautgw/correlators.hpp"
#include "tautgw/potentials.hpp"
#include "tautgw/verify.hpp"

using namespace tautgw;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kEngineError = 1;
constexpr int kConfigError = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// "r=2", "2", "P2", an inline JSON object or a path to a JSON file.
json target_json(const std::string& s)
{
    if (s.empty())
        throw ConfigError("empty --target");
    if (s.front() == '{') {
        try {
            return json::parse(s);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("--target: ") + e.what());
        }
    }
    std::string digits = s;
    if (digits.rfind("r=", 0) == 0)
        digits = digits.substr(2);
    else if (!digits.empty() && (digits.front() == 'P' || digits.front() == 'p'))
        digits = digits.substr(1);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos)
        return {{"type", "projective_space"}, {"r", std::stoi(digits)}};
    return read_json_file(s);
}

TargetPtr parse_target(const std::string& s)
{
    try {
        return TargetModel::from_json(target_json(s));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
}

// "a,alpha,mult;a,alpha,mult" -> [[a,alpha,mult],...]; mult defaults to 1
json parse_slots(const std::string& s, const char* flag)
{
    json out = json::array();
    std::stringstream all(s);
    std::string item;
    while (std::getline(all, item, ';')) {
        if (item.find_first_not_of(" ") == std::string::npos)
            continue;
        std::vector<int> v;
        std::stringstream one(item);
        std::string num;
        while (std::getline(one, num, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stoi(num, &used));
                if (num.find_first_not_of(" ", used) != std::string::npos)
                    throw std::invalid_argument(num);
            } catch (const std::exception&) {
                throw ConfigError(std::string(flag) + ": malformed entry '" + item + "'");
            }
        }
        if (v.size() == 2)
            v.push_back(1);
        if (v.size() != 3)
            throw ConfigError(std::string(flag) + ": entries must be a,alpha[,mult]");
        out.push_back(v);
    }
    return out;
}

std::string monomial_str(const VarRegistry& reg, const Exponents& e)
{
    std::string s;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0)
            continue;
        if (!s.empty())
            s += "*";
        s += reg[i].name();
        if (e[i] > 1)
            s += "^" + std::to_string(e[i]);
    }
    return s.empty() ? "1" : s;
}

struct CorrelatorOpts {
    std::string spec_file, target = "r=1", tau, kappa;
    int degree = 0;
};

int cmd_correlator(const CorrelatorOpts& o, const std::string& format)
{
    std::optional<CorrelatorKey> key;
    try {
        json j;
        if (!o.spec_file.empty()) {
            j = read_json_file(o.spec_file);
        } else {
            j = {{"target", target_json(o.target)},
                 {"degree", o.degree},
                 {"tau", parse_slots(o.tau, "--tau")},
                 {"kappa", parse_slots(o.kappa, "--kappa")}};
        }
        key = key_from_json(j);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    Evaluation ev;
    std::optional<int> dim;
    try {
        ev = evaluate_counted(*key);
        if (TargetModel::is_stable(key->n(), key->beta))
            dim = expected_dimension(*key);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEngineError;
    }

    if (format == "json") {
        json out = {{"key", key_to_json(*key)},
                    {"correlator", key->str()},
                    {"value", ev.value.str()},
                    {"expected_dimension", dim ? json(*dim) : json(nullptr)},
                    {"reductions", ev.reductions}};
        std::cout << out.dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << "correlator,value,expected_dimension,reductions\n";
        std::cout << '"' << key->str() << "\"," << ev.value.str() << "," << (dim ? std::to_string(*dim) : "")
                  << "," << ev.reductions << "\n";
    } else {
        std::cout << "correlator: " << key->str() << "\n";
        std::cout << "value: " << ev.value.str() << "\n";
        std::cout << "expected_dimension: " << (dim ? std::to_string(*dim) : "unstable") << "\n";
        std::cout << "reductions: " << ev.reductions << "\n";
    }
    return kOk;
}

struct PotentialOpts {
    std::string target = "r=1";
    std::string vars = "x0,x1";
    int qmax = 1;
    int cap = 6;
    int max_total = -1;
    int jobs = 1;
};

int cmd_potential(const PotentialOpts& o, const std::string& format)
{
    std::optional<PotentialSpec> spec;
    try {
        std::vector<std::string> names;
        std::stringstream ss(o.vars);
        std::string n;
        while (std::getline(ss, n, ','))
            if (!n.empty())
                names.push_back(n);
        if (o.qmax < 0 || o.cap < 0)
            throw ConfigError("--qmax and --cap must be >= 0");
        std::optional<int> mt;
        if (o.max_total >= 0)
            mt = o.max_total;
        spec = PotentialSpec::make(parse_target(o.target), names, o.cap, o.qmax, mt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    }

    QSeries h(spec->reg, spec->trunc);
    try {
        h = build_H_series(*spec, o.jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEngineError;
    }

    const auto& reg = h.registry();
    if (format == "json") {
        json out = series_to_json(h);
        json table = json::array();
        for (const auto& [e, c] : h.terms())
            table.push_back({{"monomial", monomial_str(reg, e)}, {"coef", c.str()}});
        out["table"] = table;
        std::cout << out.dump(2) << "\n";
    } else if (format == "csv") {
        for (const auto& v : reg.variables())
            std::cout << v.name() << ",";
        std::cout << "coef\n";
        for (const auto& [e, c] : h.terms()) {
            for (int x : e)
                std::cout << x << ",";
            std::cout << c.str() << "\n";
        }
    } else {
        for (const auto& [e, c] : h.terms())
            std::cout << monomial_str(reg, e) << " : " << c.str() << "\n";
    }
    return kOk;
}

int cmd_verify(const std::string& suite, const std::string& target, VerifyOptions opts, const std::string& format)
{
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::cerr << "config error: unknown suite '" << suite << "'\n";
        return kConfigError;
    }
    if (!target.empty()) {
        try {
            auto t = parse_target(target);
            if (!t->is_projective_space())
                throw ConfigError("verification suites run on projective spaces");
            opts.r = t->rank() - 1;
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kConfigError;
        }
    }
    SuiteReport rep;
    try {
        rep = run_suite(suite, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kEngineError;
    }
    if (format == "json") {
        json out = {{"suite", rep.name}, {"seed", rep.seed}, {"passed", rep.passed}, {"lines", rep.lines}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "suite " << rep.name << " seed " << rep.seed << "\n";
        for (const auto& l : rep.lines)
            std::cout << l << "\n";
        std::cout << (rep.passed ? "PASS" : "FAIL") << "\n";
    }
    return rep.passed ? kOk : kEngineError;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Genus-0 Gromov-Witten invariants with psi and kappa classes"};
    app.require_subcommand(1);
    std::string format = "text";
    app.add_option("--format", format, "json, csv or text")
        ->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();

    CorrelatorOpts co;
    auto* corr = app.add_subcommand("correlator", "evaluate one correlator");
    corr->add_option("--spec", co.spec_file, "JSON correlator spec");
    corr->add_option("--target", co.target, "r=K, a JSON object or a JSON file")->capture_default_str();
    corr->add_option("--degree", co.degree)->check(CLI::NonNegativeNumber);
    corr->add_option("--tau", co.tau, "a,alpha,mult;...");
    corr->add_option("--kappa", co.kappa, "a,alpha,mult;... (a >= -1)");
    corr->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));

    PotentialOpts po;
    auto* pot = app.add_subcommand("potential", "print the generating function");
    pot->add_option("--target", po.target)->capture_default_str();
    pot->add_option("--vars", po.vars, "comma-separated, e.g. x0,x1,s0_1")->capture_default_str();
    pot->add_option("--qmax", po.qmax)->capture_default_str();
    pot->add_option("--cap", po.cap, "per-variable exponent cap")->capture_default_str();
    pot->add_option("--max-total", po.max_total, "bound on the total variable degree");
    pot->add_option("--jobs", po.jobs)->check(CLI::PositiveNumber);
    pot->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "text"}));

    VerifyOptions vo;
    std::string suite, vtarget;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("--suite,suite", suite, "cp1, wdvv, trr, dilaton or trees");
    ver->add_option("--target", vtarget);
    ver->add_option("--qmax", vo.qmax)->check(CLI::NonNegativeNumber);
    ver->add_option("--samples", vo.samples)->check(CLI::NonNegativeNumber);
    ver->add_option("--seed", vo.seed);
    ver->add_option("--jobs", vo.jobs)->check(CLI::PositiveNumber);
    ver->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (corr->parsed())
        return cmd_correlator(co, format);
    if (pot->parsed())
        return cmd_potential(po, format);
    if (suite.empty()) {
        std::cerr << "config error: no suite given\n";
        return kConfigError;
    }
    return cmd_verify(suite, vtarget, vo, format);
}
