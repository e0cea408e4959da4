#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "conley/commands.hpp"

int main(int argc, char** argv) {
    using namespace conley::cli;
    CLI::App app{"Conley complexes, connection matrices and persistence of graded cell complexes"};
    app.require_subcommand(1);

    CommonOptions common;
    ConnectOptions connect;
    PersistOptions persist;
    std::string path, stage = "output", strategy = "coreduction";
    std::uint32_t field = 0;
    unsigned threads = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("path", path, "input file")->required();
        sub->add_option("--field", field, "prime modulus, overrides the document");
        sub->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    };
    auto add_strategy = [&](CLI::App* sub) {
        sub->add_option("--strategy", strategy, "coreduction | coordinate")
            ->check(CLI::IsMember({"coreduction", "coordinate"}));
    };

    auto* validate = app.add_subcommand("validate", "check the cell-complex conditions and the grading");
    add_common(validate);

    auto* homology = app.add_subcommand("homology", "reduce to a minimal complex and print its Poincare polynomial");
    add_common(homology);
    add_strategy(homology);
    homology->add_flag("--emit-tower", connect.emit_tower, "include the critical cells of every tower step");
    homology->add_option("--out", connect.out_path, "write the result document here");

    auto* connect_cmd = app.add_subcommand("connect", "compute a Conley complex (connection matrix)");
    add_common(connect_cmd);
    add_strategy(connect_cmd);
    connect_cmd->add_flag("--blocks", connect.blocks, "list nonzero blocks with shapes and ranks");
    connect_cmd->add_flag("--emit-tower", connect.emit_tower, "include the critical cells of every tower step");
    connect_cmd->add_option("--out", connect.out_path, "write the result document here");

    auto* graph = app.add_subcommand("graph", "fiber graph as DOT");
    add_common(graph);
    add_strategy(graph);
    graph->add_option("--stage", stage, "input | output")->check(CLI::IsMember({"input", "output"}));
    graph->add_option("--out", connect.out_path, "write the DOT text here");

    auto* persist_cmd = app.add_subcommand("persist", "persistence diagram or persistent Betti numbers as CSV");
    add_common(persist_cmd);
    add_strategy(persist_cmd);
    auto* ext = persist_cmd->add_option("--extension", persist.extension, "linear extension e1,e2,...");
    auto* pairs = persist_cmd->add_option("--pairs", persist.pairs_path, "file of down-set pairs");
    ext->excludes(pairs);
    persist_cmd->add_option("--via", persist.via, "direct | conley")->check(CLI::IsMember({"direct", "conley"}));
    persist_cmd->add_option("--out", persist.out_path, "write the CSV here");

    auto* cubical = app.add_subcommand("cubical", "build a graded cubical complex document from a grid file");
    add_common(cubical);
    std::string cubical_out;
    cubical->add_option("--out", cubical_out, "write the document here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    if (field != 0) common.field = field;
    common.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    try {
        connect.strategy = persist.strategy = conley::parse_strategy(strategy);
    } catch (const conley::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    }

    if (*validate) return cmd_validate(path, common, std::cout, std::cerr);
    if (*homology) return cmd_homology(path, common, connect, std::cout, std::cerr);
    if (*connect_cmd) return cmd_connect(path, common, connect, std::cout, std::cerr);
    if (*graph) return cmd_graph(path, stage, common, connect, std::cout, std::cerr);
    if (*persist_cmd) return cmd_persist(path, common, persist, std::cout, std::cerr);
    if (*cubical) return cmd_cubical(path, common, cubical_out, std::cout, std::cerr);
    return exit_usage;
}
