#include <shiftwaring/cli.hpp>
#include <shiftwaring/parallel.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char **argv)
{
    CLI::App app{"Shifted Waring witnesses: search, certificates and gap scans"};
    app.require_subcommand(1, 1);

    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    shiftwaring::RunOptions opt;
    opt.workers = shiftwaring::default_workers();

    const std::map<std::string, std::string> about = {
        {"witness", "tau_m and the nearest integer to (tau_m / s)^(1/k) for m in [m_lo, m_hi]"},
        {"search", "solutions of the residual system at one tau"},
        {"certify", "derive and audit the certificate constants"},
        {"verify", "search tau_m over an m range against a certificate"},
        {"scan", "grid of tau around tau_m inside and beyond the predicted gap"},
        {"phase", "exploratory solution density over radius and tolerance exponents"},
    };
    for (const auto &name : shiftwaring::commands()) {
        auto *sub = app.add_subcommand(name, about.at(name));
        sub->add_option("-c,--config", config_path, "config file");
        sub->add_option("--set", overrides, "override, section.key=value")->take_all();
        sub->add_option("-w,--workers", opt.workers, "worker threads (default: SHIFTWARING_WORKERS or 1)")
            ->check(CLI::PositiveNumber);
        sub->add_option("-o,--out-dir", opt.out_dir, "write json/csv/svg files here");
        sub->add_option("--format", opt.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return shiftwaring::exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    shiftwaring::Config cfg;
    try {
        cfg = shiftwaring::parse_config(config_path, overrides);
    } catch (const shiftwaring::config_error &e) {
        std::cerr << shiftwaring::detail::diagnostic("config", e.what(), e.key_path()).dump() << '\n';
        return shiftwaring::exit_config;
    } catch (const std::exception &e) {
        std::cerr << shiftwaring::detail::diagnostic("config", e.what()).dump() << '\n';
        return shiftwaring::exit_config;
    }
    return shiftwaring::run(command, cfg, opt, std::cout, std::cerr);
}
