#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "segsolve/execute.hpp"
#include "segsolve/parallel.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Finite-difference solver for nonlocal segregation systems"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    for (const char* name : {"solve", "sweep", "parabolic", "fb1d"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides [output] directory)");
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "segsolve: cannot read " << config_path << '\n';
        return segsolve::exit_status::io_error;
    }
    std::ostringstream text;
    text << in.rdbuf();

    unsigned threads = 1;
    try {
        threads = segsolve::threads_from_environment();
    } catch (const std::exception& e) {
        std::cerr << "segsolve: " << e.what() << '\n';
        return segsolve::exit_status::invalid_config;
    }

    const auto outcome =
        segsolve::execute_text(text.str(), segsolve::command_from_string(command),
                               out_dir.empty() ? std::nullopt : std::optional<std::string>(out_dir), threads);
    if (outcome.status != segsolve::exit_status::ok)
        std::cerr << "segsolve: " << outcome.message << '\n';
    else
        std::cerr << "segsolve: " << command << " finished, results in " << outcome.out_dir << '\n';
    return outcome.status;
}
