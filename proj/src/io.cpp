#include "hardylab/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardylab/error.hpp"

namespace hardylab {

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LabError(Stage::io, "cannot open " + tmp.string());
        out << content;
        if (!out) throw LabError(Stage::io, "short write to " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw LabError(Stage::io, "rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LabError(Stage::io, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace hardylab
