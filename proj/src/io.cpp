#include <exposure_glm/io.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace exposure_glm::io {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

double parse_double(std::string_view field, std::size_t row, const std::string& column) {
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ParseError(row, column,
                         "row " + std::to_string(row) + ", column '" + column + "': '" +
                             std::string(field) + "' is not a finite number");
    }
    return value;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string_view>> rows;  // rows[k] is file row k + 2
};

Table read_table(std::string_view text, std::string_view value_column) {
    Table table;
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        lines.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError(1, "", "file is empty; expected a header row");

    std::string_view header_line = lines.front();
    if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
    for (auto h : split(header_line)) table.header.emplace_back(h);

    const std::vector<std::string> expected{"contract_id", "exposure", std::string(value_column)};
    for (std::size_t j = 0; j < expected.size(); ++j) {
        if (j >= table.header.size() || table.header[j] != expected[j]) {
            throw ParseError(1, expected[j],
                             "header must start with 'contract_id,exposure," + std::string(value_column) +
                                 "', missing or misplaced column '" + expected[j] + "'");
        }
    }
    std::set<std::string> seen;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (table.header[j].empty()) throw ParseError(1, "", "empty column name in header");
        if (!seen.insert(table.header[j]).second) {
            throw ParseError(1, table.header[j], "duplicate column name '" + table.header[j] + "'");
        }
    }
    if (lines.size() < 2) throw ParseError(2, "", "file has a header but no data rows");

    for (std::size_t k = 1; k < lines.size(); ++k) {
        auto fields = split(lines[k]);
        if (fields.size() != table.header.size()) {
            throw ParseError(k + 1, "", "row " + std::to_string(k + 1) + " has " + std::to_string(fields.size()) +
                                            " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    return table;
}

void check_id(std::string_view id, std::size_t row, std::set<std::string, std::less<>>& ids) {
    if (id.empty()) throw ParseError(row, "contract_id", "row " + std::to_string(row) + ": empty contract_id");
    if (!ids.emplace(id).second) {
        throw ParseError(row, "contract_id",
                         "row " + std::to_string(row) + ": duplicate contract_id '" + std::string(id) + "'");
    }
}

double parse_exposure(std::string_view field, std::size_t row) {
    const double t = parse_double(field, row, "exposure");
    if (!(t > 0.0 && t <= 1.0)) {
        throw ParseError(row, "exposure",
                         "row " + std::to_string(row) + ", column 'exposure': " + std::string(field) +
                             " is outside (0, 1]");
    }
    return t;
}

std::vector<double> parse_covariates(const std::vector<std::string_view>& fields, const Table& table,
                                     std::size_t row) {
    std::vector<double> x;
    for (std::size_t j = 3; j < fields.size(); ++j) x.push_back(parse_double(fields[j], row, table.header[j]));
    return x;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

Portfolio parse_portfolio_csv(std::string_view text) {
    const Table table = read_table(text, "loss_cost");
    std::vector<Observation> obs;
    std::set<std::string, std::less<>> ids;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& f = table.rows[k];
        const std::size_t row = k + 2;
        check_id(f[0], row, ids);
        Observation o;
        o.contract_id = std::string(f[0]);
        o.exposure = parse_exposure(f[1], row);
        o.loss_cost = parse_double(f[2], row, "loss_cost");
        if (o.loss_cost < 0.0) {
            throw ParseError(row, "loss_cost",
                             "row " + std::to_string(row) + ", column 'loss_cost': negative loss " +
                                 std::string(f[2]));
        }
        o.covariates = parse_covariates(f, table, row);
        obs.push_back(std::move(o));
    }
    std::vector<std::string> names(table.header.begin() + 3, table.header.end());
    return Portfolio(std::move(obs), std::move(names));
}

CountData parse_count_csv(std::string_view text) {
    const Table table = read_table(text, "count");
    std::vector<CountObservation> obs;
    std::set<std::string, std::less<>> ids;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& f = table.rows[k];
        const std::size_t row = k + 2;
        check_id(f[0], row, ids);
        CountObservation o;
        o.contract_id = std::string(f[0]);
        o.exposure = parse_exposure(f[1], row);
        const double c = parse_double(f[2], row, "count");
        if (c < 0.0 || c != std::floor(c) || c > 1e9) {
            throw ParseError(row, "count",
                             "row " + std::to_string(row) + ", column 'count': '" + std::string(f[2]) +
                                 "' is not a non-negative integer");
        }
        o.count = static_cast<int>(c);
        o.covariates = parse_covariates(f, table, row);
        obs.push_back(std::move(o));
    }
    std::vector<std::string> names(table.header.begin() + 3, table.header.end());
    return CountData(std::move(obs), std::move(names));
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("io_error", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Portfolio ingest_csv(const std::filesystem::path& path) { return parse_portfolio_csv(read_file(path)); }

CountData ingest_count_csv(const std::filesystem::path& path) { return parse_count_csv(read_file(path)); }

std::string portfolio_to_csv(const Portfolio& portfolio) {
    std::string out = "contract_id,exposure,loss_cost";
    for (const auto& name : portfolio.covariate_names()) out += "," + name;
    out += "\n";
    for (const auto& o : portfolio.observations()) {
        out += o.contract_id + "," + format_number(o.exposure) + "," + format_number(o.loss_cost);
        for (double x : o.covariates) out += "," + format_number(x);
        out += "\n";
    }
    return out;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("io_error", "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error("io_error", "write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace exposure_glm::io
