#include <exception>
#include <filesystem>
#include <iostream>

#include "common.hpp"

#include "lbm/cases.hpp"
#include "lbm/sweep.hpp"
#include "lbm/telemetry.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "lbmbench - D3Q19 lattice Boltzmann benchmark kit with "
        "energy/telemetry analysis"};
    app.require_subcommand(1);

    lbmbench::register_simulate(app);
    lbmbench::register_validate(app);
    lbmbench::register_analyze(app);
    lbmbench::register_sweep(app);
    lbmbench::register_perf(app);

    try {
        app.parse(argc, argv);
    } catch (const lbmbench::ExitWith& e) {
        return e.code;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? lbmbench::kExitOk : lbmbench::kExitDomain;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lbmbench::kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lbmbench::kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return lbmbench::kExitDomain;
    }
    return lbmbench::kExitOk;
}
