// cbtree: command-line driver for branching systems of closed subsets of [0,1].
//
// Exit status: 0 success, 1 domain error, 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cbtree/cbtree.hpp"

namespace {

using namespace cbtree;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

SetDescription read_description(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_description(text.str());
}

constexpr std::size_t kOracleDepth = 12;

int classify_cmd(const std::string& file, bool oracle_check, std::size_t budget) {
    SetDescription d = read_description(file);
    TreeAutomaton t = build(d);
    Classification c = classify(t, budget);
    std::cout << c.to_string() << "\n";
    if (!oracle_check) return 0;
    bool agree = oracle::safe_band_agrees(t, prune_once(t), kOracleDepth);
    auto brute = oracle::brute_kernel(oracle::brute_truncate(d, kOracleDepth));
    agree = agree && brute && brute->empty == c.countable();
    std::cout << "oracle=" << (agree ? "agree" : "disagree") << " band=" << kOracleDepth - oracle::kBandMargin << "\n";
    return agree ? 0 : 1;
}

Scale scale_named(const std::string& name) {
    if (name == "D") return Scale::identity();
    if (name == "E") return Scale::e_formula();
    return Scale::enumerated(named_order(name).order);
}

std::string word_or_root(const BinaryWord& w) { return w.empty() ? "ε" : w.str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cantor-Bendixson pruning of branching systems over [0,1]"};
    app.require_subcommand(1);

    std::string file;
    bool oracle_flag = false;
    std::size_t budget = kDefaultBranchBudget;
    auto* classify_app = app.add_subcommand("classify", "countable or continuum verdict");
    classify_app->add_option("file", file, "set description")->required();
    classify_app->add_flag("--oracle", oracle_flag, "cross-check against the finite-depth oracle");
    classify_app->add_option("--budget", budget, "maximal cut-node length enumerated")->check(CLI::Range(0, 64));

    auto* rank_app = app.add_subcommand("rank", "number of productive pruning stages");
    rank_app->add_option("file", file, "set description")->required();

    std::string emit = "text";
    auto* kernel_app = app.add_subcommand("kernel", "perfect kernel automaton");
    kernel_app->add_option("file", file, "set description")->required();
    kernel_app->add_option("--emit", emit, "output format")->check(CLI::IsMember({"dot", "text"}));

    std::string scale_name, point_text, rule_text;
    std::size_t approx_depth = kDefaultApproximationDepth;
    auto* map_app = app.add_subcommand("map-point", "overlay a point of [0,1] onto a scale");
    map_app->add_option("--scale", scale_name, "D, E, omega or finite:<list>")->required();
    map_app->add_option("--point", point_text, "dyadic point a/2^n")->required();
    map_app->add_option("--rule", rule_text, "endpoint rule")->required()->check(CLI::IsMember({"left", "right"}));
    map_app->add_option("--depth", approx_depth, "approximation depth for enumerated scales")
        ->check(CLI::Range(1, 24));

    std::size_t count = 0;
    auto* scale_app = app.add_subcommand("scale", "first elements of a named order");
    scale_app->add_option("name", scale_name, "D, E, omega or finite:<list>")->required();
    scale_app->add_option("--count", count, "number of elements")->required()->check(CLI::PositiveNumber);

    std::string order_a, order_b;
    std::size_t rounds = 0;
    auto* bf_app = app.add_subcommand("back-and-forth", "partial order-isomorphism between two orders");
    bf_app->add_option("--a", order_a, "domain order")->required();
    bf_app->add_option("--b", order_b, "range order")->required();
    bf_app->add_option("-n", rounds, "rounds")->required()->check(CLI::PositiveNumber);

    ClosureOptions closure_options;
    bool force_truncation = false;
    auto* closure_app = app.add_subcommand("closure", "closure, kernel and J/J1/J2 of an enumerated set");
    closure_app->add_option("--order", order_a, "D, E, omega or finite:<list>")->required();
    closure_app->add_option("--depth", closure_options.depth, "truncation depth")->required()->check(CLI::PositiveNumber);
    closure_app->add_option("--limit", closure_options.limit, "enumerated points classified")
        ->check(CLI::PositiveNumber);
    closure_app->add_flag("--truncated", force_truncation, "ignore the regular closure and sample instead");

    std::size_t depth = 0;
    auto* truncate_app = app.add_subcommand("truncate", "explicit nodes up to a depth");
    truncate_app->add_option("file", file, "set description")->required();
    truncate_app->add_option("--depth", depth, "depth")->required()->check(CLI::Range(0, 24));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*classify_app) return classify_cmd(file, oracle_flag, budget);
        if (*rank_app) {
            std::cout << "rank=" << perfect_kernel(build(read_description(file))).rank << "\n";
        } else if (*kernel_app) {
            TreeAutomaton k = perfect_kernel(build(read_description(file))).kernel;
            std::cout << (emit == "dot" ? to_dot(k, "kernel") : to_text(k));
        } else if (*map_app) {
            DyadicRational x = DyadicRational::parse(point_text);
            EndpointRule rule = rule_text == "left" ? EndpointRule::Left : EndpointRule::Right;
            std::cout << overlay(scale_named(scale_name), x, rule, approx_depth).to_string() << "\n";
        } else if (*scale_app) {
            DyadicOrder o = named_order(scale_name).order;
            for (std::size_t i = 1; i <= o.available(count); ++i) std::cout << i << " " << o.at(i) << "\n";
        } else if (*bf_app) {
            auto pairs = back_and_forth(named_order(order_a).order, named_order(order_b).order, rounds);
            for (const auto& [a, b] : pairs) std::cout << a << " -> " << b << "\n";
        } else if (*closure_app) {
            NamedOrder o = named_order(order_a);
            if (force_truncation) o.closure.reset();
            ClosureDecomposition c = closure_construct(o.order, closure_options, o.closure);
            std::cout << "closure order=" << order_a << " depth=" << closure_options.depth << "\n" << c.to_string();
        } else if (*truncate_app) {
            oracle::FiniteTree f = oracle::truncate(build(read_description(file)), depth);
            std::vector<BinaryWord> words(f.nodes.begin(), f.nodes.end());
            std::stable_sort(words.begin(), words.end(),
                             [](const BinaryWord& a, const BinaryWord& b) { return a.size() < b.size(); });
            std::cout << "depth=" << depth << " nodes=" << words.size() << "\n";
            for (const auto& w : words) std::cout << word_or_root(w) << "\n";
        }
        return 0;
    } catch (const DomainError& e) {
        std::cout.flush();
        std::cerr << "error: " << e.kind() << ": " << e.value() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }
}
