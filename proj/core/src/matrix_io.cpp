#include "glme/matrix_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "glme/errors.hpp"

namespace glme {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

double parse_double(const std::string& token, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
        if (pos != token.size()) throw IoError("");
        if (!std::isfinite(v)) {
            throw IoError(context + ": non-finite value '" + token + "'");
        }
        return v;
    } catch (const IoError&) {
        throw;
    } catch (const std::exception&) {
        throw IoError(context + ": cannot parse '" + token + "' as a number");
    }
}

}  // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(std::ostream& out, const DenseMatrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) out << ',';
            out << format_full(a(i, j));
        }
        out << '\n';
    }
}

void write_csv(const std::string& path, const DenseMatrix& a) {
    auto out = open_out(path);
    write_csv(out, a);
    if (!out) throw IoError("write failed: " + path);
}

DenseMatrix read_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Skip fully blank lines (e.g. trailing newline).
        bool blank = true;
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ',')) {
            row.push_back(parse_double(token, "CSV line " + std::to_string(lineno)));
        }
        if (rows == 0) {
            cols = row.size();
        } else if (row.size() != cols) {
            throw IoError("CSV line " + std::to_string(lineno) + ": expected " +
                          std::to_string(cols) + " columns, got " + std::to_string(row.size()));
        }
        data.insert(data.end(), row.begin(), row.end());
        ++rows;
    }
    if (rows == 0 || cols == 0) throw IoError("CSV input contains no data");
    return DenseMatrix(rows, cols, std::move(data));
}

DenseMatrix read_csv(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_csv(in);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    for (const Triplet& t : a.triplets()) {
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << format_full(t.value) << '\n';
    }
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
    auto out = open_out(path);
    write_matrix_market(out, a);
    if (!out) throw IoError("write failed: " + path);
}

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("Matrix Market input is empty");
    std::stringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix") {
        throw IoError("Matrix Market: bad banner line '" + line + "'");
    }
    if (format != "coordinate" || (field != "real" && field != "integer") ||
        symmetry != "general") {
        throw IoError("Matrix Market: unsupported variant '" + format + " " + field + " " +
                      symmetry + "' (only 'coordinate real general' is supported)");
    }
    // Skip comments, find the size line.
    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_size = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '%') continue;
        bool blank = true;
        for (char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) continue;
        std::stringstream ss(line);
        if (!(ss >> rows >> cols >> nnz)) {
            throw IoError("Matrix Market: bad size line '" + line + "'");
        }
        have_size = true;
        break;
    }
    if (!have_size) throw IoError("Matrix Market: missing size line");
    std::vector<Triplet> ts;
    ts.reserve(nnz);
    std::size_t count = 0;
    while (count < nnz && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::stringstream ss(line);
        std::size_t i = 0, j = 0;
        std::string value;
        if (!(ss >> i >> j >> value)) {
            throw IoError("Matrix Market: bad entry line '" + line + "'");
        }
        if (i == 0 || j == 0) {
            throw IoError("Matrix Market: indices are 1-based, got entry line '" + line + "'");
        }
        ts.push_back({i - 1, j - 1, parse_double(value, "Matrix Market entry")});
        ++count;
    }
    if (count != nnz) {
        throw IoError("Matrix Market: expected " + std::to_string(nnz) + " entries, got " +
                      std::to_string(count));
    }
    return SparseMatrix(rows, cols, std::move(ts));
}

SparseMatrix read_matrix_market(const std::string& path) {
    auto in = open_in(path);
    try {
        return read_matrix_market(in);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

}  // namespace glme
