#include "switchosc/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <locale>
#include <map>
#include <sstream>

#include "switchosc/errors.hpp"

namespace switchosc {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, r.ptr);
}

double parse_number(const std::string& s) {
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw DomainError("malformed number '" + s + "'");
    return v;
}

std::vector<CsvRow> trajectory_rows(const Trajectory& t) {
    std::vector<CsvRow> rows;
    for (const auto& seg : t.segments()) {
        for (const auto& s : seg.samples) {
            if (!rows.empty() && s.x <= rows.back().x) continue;
            rows.push_back({s.x, s.y, std::string(to_string(seg.mode)), seg.branch, ""});
        }
    }
    // attach each event to the nearest row
    for (const auto& e : t.events()) {
        if (rows.empty()) break;
        auto it = std::lower_bound(rows.begin(), rows.end(), e.x, [](const CsvRow& r, double x) { return r.x < x; });
        if (it == rows.end()) --it;
        if (it != rows.begin() && std::fabs(std::prev(it)->x - e.x) < std::fabs(it->x - e.x)) --it;
        if (!it->event.empty()) it->event += ';';
        it->event += to_string(e.kind);
    }
    return rows;
}

std::string rows_csv(const std::vector<CsvRow>& rows) {
    std::string out = kTrajectoryCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += format_number(r.x);
        out += ',';
        out += format_number(r.y);
        out += ',';
        out += r.mode;
        out += ',';
        out += std::to_string(r.branch);
        out += ',';
        out += r.event;
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory& t) { return rows_csv(trajectory_rows(t)); }

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            f.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    f.push_back(cur);
    return f;
}

}  // namespace

std::vector<CsvRow> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DomainError("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryCsvHeader) throw DomainError("unexpected CSV header '" + line + "'");
    std::vector<CsvRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 5) throw DomainError("line " + std::to_string(lineno) + ": expected 5 fields");
        CsvRow r;
        r.x = parse_number(f[0]);
        r.y = parse_number(f[1]);
        r.mode = f[2];
        r.branch = static_cast<int>(parse_number(f[3]));
        r.event = f[4];
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string table_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + r[i];
        out += '\n';
    }
    return out;
}

namespace {

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string fmt(double v, int prec = 6) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, prec);
    return std::string(buf, r.ptr);
}

// 1-2-5 ticks covering [lo, hi]
std::vector<double> nice_ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) { step = m * mag; break; }
    std::vector<double> t;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
        t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return t;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
    constexpr double W = 800, H = 500, L = 80, R = 20, T = 40, B = 60;
    auto tx = [&](double v) { return plot.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return plot.log_y ? std::log10(v) : v; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : plot.series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
            x0 = std::min(x0, tx(x)); x1 = std::max(x1, tx(x));
            y0 = std::min(y0, ty(y)); y1 = std::max(y1, ty(y));
        }
    if (!(x0 <= x1)) { x0 = 0; x1 = 1; y0 = 0; y1 = 1; }
    if (x1 - x0 < 1e-12) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-12) { y0 -= 0.5; y1 += 0.5; }
    const double py = 0.05 * (y1 - y0);
    y0 -= py; y1 += py;
    auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
    auto pyy = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!plot.title.empty())
        o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(plot.title) << "</text>\n";
    o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(x0, x1)) {
        const double X = L + (t - x0) / (x1 - x0) * (W - L - R);
        o << "<line x1=\"" << fmt(X) << "\" y1=\"" << H - B << "\" x2=\"" << fmt(X) << "\" y2=\"" << H - B + 5
          << "\" stroke=\"black\"/><text x=\"" << fmt(X) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
          << (plot.log_x ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    }
    for (double t : nice_ticks(y0, y1)) {
        const double Y = H - B - (t - y0) / (y1 - y0) * (H - T - B);
        o << "<line x1=\"" << L - 5 << "\" y1=\"" << fmt(Y) << "\" x2=\"" << L << "\" y2=\"" << fmt(Y)
          << "\" stroke=\"black\"/><text x=\"" << L - 8 << "\" y=\"" << fmt(Y + 4) << "\" text-anchor=\"end\">"
          << (plot.log_y ? "1e" + fmt(t) : fmt(t)) << "</text>\n";
    }
    o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << esc(plot.xlabel)
      << "</text>\n<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (T + H - B) / 2 << ")\">" << esc(plot.ylabel) << "</text>\n";
    int legend = 0;
    for (const auto& s : plot.series) {
        if (s.markers) {
            for (const auto& [x, y] : s.points) {
                if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
                o << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(pyy(y)) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\""
              << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
            bool first = true;
            for (const auto& [x, y] : s.points) {
                if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
                o << (first ? "" : " ") << fmt(px(x)) << ',' << fmt(pyy(y));
                first = false;
            }
            o << "\"/>\n";
        }
        if (!s.name.empty()) {
            const double ly = T + 15 + 15 * legend++;
            o << "<line x1=\"" << W - R - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R - 130 << "\" y2=\"" << ly - 4
              << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/><text x=\"" << W - R - 125 << "\" y=\"" << ly
              << "\">" << esc(s.name) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

std::string svg_from_rows(const std::vector<CsvRow>& rows, const std::string& title) {
    static const std::map<std::string, std::string> colors = {
        {"flow+", "#d62728"}, {"flow-", "#1f77b4"}, {"sliding", "#2ca02c"}, {"layer", "#9467bd"}};
    SvgPlot plot;
    plot.title = title;
    plot.ylabel = "y";
    for (const auto& r : rows)
        if (r.mode == "layer") plot.ylabel = "v";
    std::map<std::string, bool> named;
    for (std::size_t i = 0; i < rows.size();) {
        SvgSeries s;
        s.color = colors.count(rows[i].mode) ? colors.at(rows[i].mode) : "#7f7f7f";
        if (!named[rows[i].mode]) {
            s.name = rows[i].mode;
            named[rows[i].mode] = true;
        }
        std::size_t j = i;
        while (j < rows.size() && rows[j].mode == rows[i].mode) {
            s.points.emplace_back(rows[j].x, rows[j].y);
            ++j;
        }
        if (j < rows.size()) s.points.emplace_back(rows[j].x, rows[j].y);  // join to the next run
        plot.series.push_back(std::move(s));
        i = j;
    }
    return render_svg(plot);
}

void write_text_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw DomainError("cannot write " + path);
    f << text;
    if (!f) throw DomainError("write failed for " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DomainError("cannot read " + path);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace switchosc
