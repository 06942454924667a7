#include "dagwish/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dagwish {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix load_matrix(std::istream& in) {
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows < 1 || cols < 1)
        throw ParseError("matrix: bad header, expected \"rows cols\"");
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!(in >> m(i, j)))
                throw ParseError("matrix: short read at row " + std::to_string(i + 1));
    return m;
}

Matrix load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return load_matrix(in);
}

void save_matrix(std::ostream& out, const Matrix& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << format_double(m(i, j));
        }
        out << '\n';
    }
}

void save_matrix_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    save_matrix(out, m);
}

SymMatrix load_sym_matrix_file(const std::string& path) {
    return SymMatrix::from_matrix(load_matrix_file(path), 1e-9);
}

void save_sym_matrix_file(const std::string& path, const SymMatrix& m) {
    save_matrix_file(path, m.to_matrix());
}

Dag load_dag(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("dag: missing header");
    int p = 0;
    try {
        p = std::stoi(line);
    } catch (...) {
        throw ParseError("dag: bad vertex count");
    }
    if (p < 1) throw ParseError("dag: bad vertex count");
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        if (!std::getline(in, line)) throw ParseError("dag: missing line for vertex " + std::to_string(i + 1));
        std::istringstream ls(line);
        std::string label;
        ls >> label;
        if (label != std::to_string(i + 1) + ":")
            throw ParseError("dag: expected \"" + std::to_string(i + 1) + ":\" prefix");
        int j;
        while (ls >> j) parents[static_cast<std::size_t>(i)].push_back(j - 1);
    }
    return Dag(p, std::move(parents));
}

Dag load_dag_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    return load_dag(in);
}

void save_dag(std::ostream& out, const Dag& dag) {
    out << dag.dim() << '\n';
    for (int i = 0; i < dag.dim(); ++i) {
        out << (i + 1) << ':';
        for (int j : dag.parents(i)) out << ' ' << (j + 1);
        out << '\n';
    }
}

void save_dag_file(const std::string& path, const Dag& dag) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    save_dag(out, dag);
}

std::string heatmap_svg(const Matrix& m, double scale_max) {
    const int cell = 12;
    const int w = m.cols() * cell, h = m.rows() * cell;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            double v = std::fabs(m(i, j));
            if (v == 0.0) continue;
            double t = scale_max > 0.0 ? std::min(1.0, v / scale_max) : 0.0;
            // White-to-dark-blue ramp.
            int r = static_cast<int>(std::lround(255.0 * (1.0 - t)));
            int g = static_cast<int>(std::lround(255.0 * (1.0 - 0.85 * t)));
            int b = static_cast<int>(std::lround(255.0 - 95.0 * t));
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", r, g, b);
            out << "<rect x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\"" << cell
                << "\" height=\"" << cell << "\" fill=\"" << color << "\"/>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace dagwish
