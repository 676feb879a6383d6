// Renders a comparison.csv as a seed-averaged mode-comparison table.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ftsim/table.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fabric transfer simulator table renderer"};
    std::string in_path, table = "aggr_cwnd";
    app.add_option("--in", in_path, "comparison.csv produced by simrun")
        ->required();
    app.add_option("--table", table, "aggr_cwnd|write_tat|read_tat");
    CLI11_PARSE(app, argc, argv);

    try {
        std::ifstream in(in_path, std::ios::binary);
        if (!in) throw ftsim::IoError("cannot open '" + in_path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        std::fputs(
            ftsim::emit_table(ss.str(), ftsim::table_kind_of(table)).c_str(),
            stdout);
        return 0;
    } catch (const ftsim::ConfigError& e) {
        std::fprintf(stderr, "simtable: %s\n", e.what());
        return 2;
    } catch (const ftsim::IoError& e) {
        std::fprintf(stderr, "simtable: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simtable: %s\n", e.what());
        return 1;
    }
}
