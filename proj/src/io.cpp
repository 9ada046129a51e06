#include "nbundle/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nbundle {

std::string format_double(double v) {
    // 17 significant digits always round-trip; trim to the shortest
    // representation that still parses back to the same bits.
    for (int prec = 15; prec <= 17; ++prec) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string serialize_click_record(const ClickRecord& rec) {
    std::ostringstream os;
    os << "# format=nbundle-clicks-v1\n";
    os << "# seed=" << rec.seed << "\n";
    os << "# duration=" << format_double(rec.duration) << "\n";
    os << "# burn_in=" << format_double(rec.burn_in) << "\n";
    os << "# dt=" << format_double(rec.dt) << "\n";
    os << "# n_max=" << rec.n_max << "\n";
    os << "# gamma_a=" << format_double(rec.params.gamma_a) << "\n";
    os << "# gamma_sigma=" << format_double(rec.params.gamma_sigma) << "\n";
    os << "# delta=" << format_double(rec.params.delta) << "\n";
    os << "# omega=" << format_double(rec.params.omega) << "\n";
    os << "# omega_L_detuning=" << format_double(rec.params.omega_L_detuning)
       << "\n";
    os << "# time_unit=1/gamma_a\n";
    os << "time,channel\n";
    for (const auto& c : rec.clicks)
        os << format_double(c.time) << ','
           << char(c.channel) << "\n";
    return os.str();
}

ClickRecord parse_click_record(const std::string& text) {
    ClickRecord rec;
    std::istringstream is(text);
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            while (!key.empty() && key.front() == ' ') key.erase(key.begin());
            const std::string val = line.substr(eq + 1);
            if (key == "seed") rec.seed = std::stoull(val);
            else if (key == "duration") rec.duration = std::strtod(val.c_str(), nullptr);
            else if (key == "burn_in") rec.burn_in = std::strtod(val.c_str(), nullptr);
            else if (key == "dt") rec.dt = std::strtod(val.c_str(), nullptr);
            else if (key == "n_max") rec.n_max = std::stoi(val);
            else if (key == "gamma_a") rec.params.gamma_a = std::strtod(val.c_str(), nullptr);
            else if (key == "gamma_sigma") rec.params.gamma_sigma = std::strtod(val.c_str(), nullptr);
            else if (key == "delta") rec.params.delta = std::strtod(val.c_str(), nullptr);
            else if (key == "omega") rec.params.omega = std::strtod(val.c_str(), nullptr);
            else if (key == "omega_L_detuning")
                rec.params.omega_L_detuning = std::strtod(val.c_str(), nullptr);
            continue;
        }
        if (!saw_header) {
            if (line != "time,channel")
                throw std::runtime_error("click record: unexpected column line '" +
                                         line + "'");
            saw_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || comma + 1 >= line.size())
            throw std::runtime_error("click record: malformed row '" + line + "'");
        Click c;
        c.time = std::strtod(line.substr(0, comma).c_str(), nullptr);
        const char ch = line[comma + 1];
        if (ch == 'a') c.channel = Channel::cavity;
        else if (ch == 's') c.channel = Channel::emitter;
        else throw std::runtime_error("click record: unknown channel '" +
                                      std::string(1, ch) + "'");
        rec.clicks.push_back(c);
    }
    if (!saw_header)
        throw std::runtime_error("click record: missing column header");
    return rec;
}

void write_click_record(const std::filesystem::path& path,
                        const ClickRecord& rec) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << serialize_click_record(rec);
}

ClickRecord read_click_record(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_click_record(ss.str());
}

CsvWriter::CsvWriter(std::vector<std::string> columns,
                     std::map<std::string, std::string> header_params)
    : columns_(std::move(columns)), params_(std::move(header_params)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size())
        throw std::invalid_argument("CsvWriter: row width mismatch");
    std::string row;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) row += ',';
        row += cells[i];
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_double(v));
    add_row(s);
}

std::string CsvWriter::str() const {
    std::string out;
    for (const auto& [k, v] : params_) out += "# " + k + "=" + v + "\n";
    for (size_t i = 0; i < columns_.size(); ++i) {
        out += (i ? "," : "") + columns_[i];
    }
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
}

void CsvWriter::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string());
    f << str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace nbundle
