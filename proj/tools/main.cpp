#include "hwfmine/abstraction.hpp"
#include "hwfmine/conformance.hpp"
#include "hwfmine/discovery.hpp"
#include "hwfmine/errors.hpp"
#include "hwfmine/hierarchy.hpp"
#include "hwfmine/serialize.hpp"
#include "hwfmine/xes.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace hwfmine;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_partition = 3;
constexpr int exit_budget = 4;

Partition read_partition_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
    if (!doc.contains("subprocesses") || !doc["subprocesses"].is_object())
        throw input_error(path + ": expected an object under key \"subprocesses\"");
    Partition partition;
    std::set<Activity> all_activities;
    for (const auto& [name, members] : doc["subprocesses"].items()) {
        if (!members.is_array() || members.empty())
            throw input_error(path + ": group '" + name + "' must be a non-empty array");
        std::set<Activity> group;
        for (const auto& value : members) {
            if (!value.is_string())
                throw input_error(path + ": group '" + name + "' contains a non-string entry");
            group.insert(value.get<std::string>());
        }
        all_activities.insert(group.begin(), group.end());
        partition.add_group(name, std::move(group));
    }
    for (const auto& [name, members] : partition.groups())
        if (all_activities.count(name))
            throw input_error(path + ": group name '" + name + "' collides with an activity");
    return partition;
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "unnamed" : out;
}

struct CommonBudgets {
    std::size_t state_budget = 1000000;
    std::size_t clone_cap = 4096;
};

int run_discover(const std::string& log_path, const std::string& partition_path,
                 const std::string& out_dir, const std::string& debug_dir,
                 const CommonBudgets& budgets) {
    const EventLog log = read_xes_file(log_path);
    const Partition partition = read_partition_file(partition_path);

    InductiveDiscoverer discoverer;
    HwfDiscoveryOptions options;
    options.clone_cap = budgets.clone_cap;
    const HwfDiscovery result = discover_hwf(log, partition, discoverer, options);

    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "hwf.json").string(), write_hwf_json(result.hwf));
    write_text_file((fs::path(out_dir) / "hwf.dot").string(), write_hwf_dot(result.hwf));
    write_text_file((fs::path(out_dir) / "high.dot").string(), write_dot(result.hwf.high, true));
    write_text_file((fs::path(out_dir) / "high.pnml").string(),
                    write_pnml(result.hwf.high, "high"));
    for (const auto& [name, subnet] : result.hwf.subnets) {
        const std::string base = "subnet_" + sanitize_filename(name);
        write_text_file((fs::path(out_dir) / (base + ".dot")).string(), write_dot(subnet));
        write_text_file((fs::path(out_dir) / (base + ".pnml")).string(),
                        write_pnml(subnet, name));
    }
    const WFNet flat = flatten(result.hwf);
    write_text_file((fs::path(out_dir) / "flat.pnml").string(), write_pnml(flat, "flat"));
    write_text_file((fs::path(out_dir) / "flat.dot").string(), write_dot(flat));

    if (!debug_dir.empty()) {
        fs::create_directories(debug_dir);
        write_text_file((fs::path(debug_dir) / "lifted.json").string(),
                        write_log_json(result.lifted_log));
        write_text_file((fs::path(debug_dir) / "folded.json").string(),
                        write_log_json(result.folded_log));
        write_text_file((fs::path(debug_dir) / "processed.json").string(),
                        write_log_json(result.processed_log));
        for (std::size_t i = 0; i < result.folds.size(); ++i)
            write_text_file(
                (fs::path(debug_dir) / ("folded_" + std::to_string(i + 1) + ".json")).string(),
                write_log_json(result.folds[i]));
        nlohmann::json registry = nlohmann::json::array();
        for (const auto& entry : result.registry.entries) {
            nlohmann::json item;
            item["name"] = entry.info.name;
            item["alphabet"] = entry.info.alphabet;
            item["joined_group"] = entry.info.joined_group;
            item["retired"] = entry.info.retired;
            registry.push_back(std::move(item));
        }
        write_text_file((fs::path(debug_dir) / "registry.json").string(), registry.dump(2) + "\n");
    }

    std::cout << "sub-processes: " << result.hwf.subnets.size() << "\n";
    std::cout << "loops found: " << result.registry.entries.size() << "\n";
    for (const auto& entry : result.registry.entries) {
        std::cout << "  " << entry.info.name << " over {";
        bool first = true;
        for (const auto& a : entry.info.alphabet) {
            if (!first) std::cout << ", ";
            std::cout << a;
            first = false;
        }
        std::cout << "}";
        if (!entry.info.joined_group.empty())
            std::cout << " inside " << entry.info.joined_group;
        if (entry.info.retired) std::cout << " (inner, substituted)";
        std::cout << "\n";
    }

    const FitnessResult fitness1 = alignment_fitness(flat, log, budgets.state_budget);
    const FitnessResult fitness2 =
        alignment_fitness(result.high_raw, result.processed_log, budgets.state_budget);
    const double precision_high =
        etc_precision(result.high_raw, result.processed_log, budgets.state_budget);
    const double precision_flat = etc_precision(flat, log, budgets.state_budget);

    std::cout.setf(std::ios::fixed);
    std::cout.precision(4);
    std::cout << "Fitness 1 (flat net vs low-level log):        " << fitness1.fitness << "\n";
    std::cout << "Fitness 2 (high-level net vs high-level log): " << fitness2.fitness << "\n";
    std::cout << "Precision (high-level):                       " << precision_high << "\n";
    std::cout << "Precision (flat):                             " << precision_flat << "\n";
    std::cout << "outputs written to " << out_dir << "\n";
    return exit_ok;
}

int run_playout(const std::string& net_path, std::size_t n, std::size_t max_len,
                std::uint64_t seed, const std::string& out_path) {
    const WFNet net = read_net_file(net_path);
    PlayoutOptions options;
    options.max_len = max_len;
    options.seed = seed;
    const EventLog log = playout(net, n, options);
    write_xes_file(log, out_path);
    std::cout << "wrote " << log.size() << " traces (" << log.variant_count() << " variants) to "
              << out_path << "\n";
    return exit_ok;
}

int run_conformance(const std::string& net_path, const std::string& log_path,
                    const std::string& out_path, const CommonBudgets& budgets) {
    const WFNet net = read_net_file(net_path);
    const EventLog log = read_xes_file(log_path);
    const ConformanceReport report = conformance_report(net, log, budgets.state_budget);
    const std::string json = to_json(report);
    if (out_path.empty())
        std::cout << json << "\n";
    else
        write_text_file(out_path, json + "\n");
    return exit_ok;
}

int run_flatten(const std::string& hwf_path, const std::string& out_dir) {
    const HWFNet hwf = read_hwf_file(hwf_path);
    if (auto violation = hwf.violation()) throw input_error(hwf_path + ": " + *violation);
    const WFNet flat = flatten(hwf);
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "flat.pnml").string(), write_pnml(flat, "flat"));
    write_text_file((fs::path(out_dir) / "flat.dot").string(), write_dot(flat));
    write_text_file((fs::path(out_dir) / "flat.json").string(), write_net_json(flat));
    std::cout << "flat net written to " << out_dir << "\n";
    return exit_ok;
}

int run_export(const std::string& net_path, const std::string& hwf_path,
               const std::string& format, const std::string& out_path) {
    std::string content;
    if (!hwf_path.empty()) {
        const HWFNet hwf = read_hwf_file(hwf_path);
        if (format == "dot")
            content = write_hwf_dot(hwf);
        else if (format == "json")
            content = write_hwf_json(hwf);
        else
            throw input_error("export: HWF-nets support formats dot and json");
    } else {
        const WFNet net = read_net_file(net_path);
        if (format == "dot")
            content = write_dot(net);
        else if (format == "pnml")
            content = write_pnml(net);
        else if (format == "json")
            content = write_net_json(net);
        else
            throw input_error("export: unknown format '" + format + "'");
    }
    if (out_path.empty())
        std::cout << content;
    else
        write_text_file(out_path, content);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discovery of two-level hierarchical workflow nets from event logs"};
    app.require_subcommand(1);

    CommonBudgets budgets;

    std::string log_path, partition_path, out_dir = "out", debug_dir;
    std::uint64_t seed = 0;
    auto* discover = app.add_subcommand("discover", "Discover an HWF-net from a log and partition");
    discover->add_option("--log", log_path, "XES event log")->required();
    discover->add_option("--partition", partition_path, "partition JSON")->required();
    discover->add_option("--out", out_dir, "output directory");
    discover->add_option("--seed", seed, "random seed (the bundled pipeline is deterministic)");
    discover->add_option("--debug-dump", debug_dir, "dump intermediate logs and loop registry");
    discover->add_option("--state-budget", budgets.state_budget, "marking exploration budget");
    discover->add_option("--clone-cap", budgets.clone_cap, "max clones per trace");

    std::string net_path, out_path;
    std::size_t n_traces = 100, max_len = 1000;
    auto* playout_cmd = app.add_subcommand("playout", "Generate an event log from a WF-net");
    playout_cmd->add_option("--net", net_path, "net file (PNML or JSON)")->required();
    playout_cmd->add_option("--n", n_traces, "number of traces");
    playout_cmd->add_option("--max-len", max_len, "max observable events per trace");
    playout_cmd->add_option("--seed", seed, "random seed");
    playout_cmd->add_option("--out", out_path, "output XES file")->required();

    std::string conf_net, conf_log, conf_out;
    auto* conformance_cmd =
        app.add_subcommand("conformance", "Fitness and precision of a net against a log");
    conformance_cmd->add_option("--net", conf_net, "net file (PNML or JSON)")->required();
    conformance_cmd->add_option("--log", conf_log, "XES event log")->required();
    conformance_cmd->add_option("--out", conf_out, "write the JSON report here");
    conformance_cmd->add_option("--state-budget", budgets.state_budget,
                                "marking exploration budget");

    std::string hwf_path, flatten_out = "out";
    auto* flatten_cmd = app.add_subcommand("flatten", "Flatten an HWF-net to a WF-net");
    flatten_cmd->add_option("--hwf", hwf_path, "HWF-net JSON")->required();
    flatten_cmd->add_option("--out", flatten_out, "output directory");

    std::string export_net, export_hwf, export_format, export_out;
    auto* export_cmd = app.add_subcommand("export", "Convert a net between formats");
    export_cmd->add_option("--net", export_net, "net file (PNML or JSON)");
    export_cmd->add_option("--hwf", export_hwf, "HWF-net JSON");
    export_cmd->add_option("--format", export_format, "dot|pnml|json")->required();
    export_cmd->add_option("--out", export_out, "output file (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (discover->parsed())
            return run_discover(log_path, partition_path, out_dir, debug_dir, budgets);
        if (playout_cmd->parsed())
            return run_playout(net_path, n_traces, max_len, seed, out_path);
        if (conformance_cmd->parsed()) return run_conformance(conf_net, conf_log, conf_out, budgets);
        if (flatten_cmd->parsed()) return run_flatten(hwf_path, flatten_out);
        if (export_cmd->parsed()) {
            if (export_net.empty() == export_hwf.empty()) {
                std::cerr << "export: give exactly one of --net or --hwf\n";
                return exit_input;
            }
            return run_export(export_net, export_hwf, export_format, export_out);
        }
    } catch (const partition_error& e) {
        std::cerr << "partition violation: " << e.what() << "\n";
        return exit_partition;
    } catch (const budget_error& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return exit_budget;
    } catch (const parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return exit_input;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return exit_input;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_ok;
}
