#include <string>
#include <vector>

#include "CLI11.hpp"
#include "biwave/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral integrator for penalized fourth-order sphere-valued waves"};
    app.require_subcommand(1);

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "integrate one configuration");
    run->add_option("config", run_config, "config file")->required();

    std::string sweep_config, eps_list = "1e-1,1e-2,1e-3";
    int jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "repeat a run over a list of penalty widths");
    sweep->add_option("config", sweep_config, "config file")->required();
    sweep->add_option("--eps", eps_list, "comma-separated decreasing epsilon list");
    sweep->add_option("--jobs", jobs, "worker threads");

    std::string conv_config, mode = "dt";
    int levels = 4;
    CLI::App* converge = app.add_subcommand("converge", "self-convergence study");
    converge->add_option("config", conv_config, "config file")->required();
    converge->add_option("--mode", mode, "dt or grid");
    converge->add_option("--levels", levels, "number of refinement levels");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return biwave::cmd_run(run_config);

    if (sweep->parsed()) {
        std::vector<double> epsilons;
        std::size_t pos = 0;
        while (pos <= eps_list.size()) {
            const std::size_t comma = eps_list.find(',', pos);
            const std::string item =
                eps_list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                if (!item.empty()) epsilons.push_back(std::stod(item));
            } catch (const std::exception&) {
                std::fprintf(stderr, "bad epsilon value '%s'\n", item.c_str());
                return biwave::kExitConfig;
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return biwave::cmd_sweep(sweep_config, epsilons, jobs);
    }

    return biwave::cmd_converge(conv_config, mode, levels);
}
