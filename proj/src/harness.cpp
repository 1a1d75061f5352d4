#include "ringshape/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "ringshape/errors.hpp"

namespace ringshape {

namespace {

double safe_rate(std::int64_t errors, std::int64_t total) {
    return total > 0 ? static_cast<double>(errors) / static_cast<double>(total) : 0.0;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

double PointResult::ber_ldpc() const { return safe_rate(ldpc_errors, ldpc_bits); }
double PointResult::ber_shaping() const { return safe_rate(shaping_errors, shaping_bits); }
double PointResult::ber() const { return safe_rate(info_errors(), info_bits()); }
double PointResult::fer() const { return safe_rate(frame_errors, frames); }

double PointResult::ci95_ber() const {
    const double n = static_cast<double>(info_bits());
    if (n <= 0) return 0.0;
    const double p = ber();
    return 1.96 * std::sqrt(std::max(p * (1.0 - p), 0.0) / n);
}

namespace {

PointResult run_point(const SchemeRun& scheme, double snr_db, const SweepSpec& spec) {
    const double n0 = snr_to_n0(snr_db, scheme.link);
    const LinkPoint lp(scheme.link, n0, spec.cov.get());

    PointResult pr;
    pr.scheme = scheme.label;
    pr.snr_db = snr_db;
    pr.snr_inner_db = snr_inner_db_from_snr(snr_db, scheme.link);
    pr.ebn0_db = ebn0_db_from_snr(snr_db, scheme.link);

    double power_sum = 0.0;
    std::int64_t power_symbols = 0;
    const auto& stop = spec.stopping;
    std::vector<FrameResult> batch(static_cast<std::size_t>(stop.batch_size));

    while (pr.frames < stop.max_frames && pr.ldpc_errors < stop.min_bit_errors) {
        const int nb = static_cast<int>(std::min<std::int64_t>(stop.batch_size,
                                                               stop.max_frames - pr.frames));
        const std::uint64_t base = static_cast<std::uint64_t>(pr.frames);
        if (spec.exec == ExecMode::parallel) {
#pragma omp parallel for schedule(dynamic)
            for (int i = 0; i < nb; ++i) batch[i] = lp.run_frame(base + i);
        } else {
            for (int i = 0; i < nb; ++i) batch[i] = lp.run_frame(base + i);
        }
        for (int i = 0; i < nb; ++i) {
            const FrameResult& fr = batch[i];
            pr.ldpc_bits += fr.ldpc_bits;
            pr.ldpc_errors += fr.ldpc_errors;
            pr.shaping_bits += fr.shaping_bits;
            pr.shaping_errors += fr.shaping_errors;
            pr.frame_errors += fr.frame_error ? 1 : 0;
            power_sum += fr.tx_power_sum;
            power_symbols += fr.tx_symbols;
        }
        pr.frames += nb;
    }
    pr.tx_power_mean = power_symbols > 0 ? power_sum / static_cast<double>(power_symbols) : 0.0;
    pr.stop = pr.ldpc_errors >= stop.min_bit_errors ? "min_errors" : "max_frames";
    return pr;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec, const std::vector<PointResult>& known,
                      const std::function<void(const SweepResult&)>& on_point) {
    if (spec.schemes.empty()) throw ConfigError("sweep: no schemes");
    if (spec.stopping.min_bit_errors < 1) throw ConfigError("sweep: min_bit_errors must be >= 1");
    if (spec.stopping.max_frames < 1) throw ConfigError("sweep: max_frames must be >= 1");
    if (spec.stopping.batch_size < 1) throw ConfigError("sweep: batch_size must be >= 1");
    for (const auto& s : spec.schemes) {
        if (s.snr_db.empty()) throw ConfigError("sweep: empty SNR grid for scheme " + s.label);
        if (s.link.knowledge == ChannelKnowledge::estimated && !spec.cov)
            throw ConfigError("sweep: estimated channel knowledge needs a covariance cache");
    }

    auto find_known = [&](const std::string& label, double snr) -> const PointResult* {
        for (const auto& p : known) {
            if (p.scheme == label && std::abs(p.snr_db - snr) < 1e-9) return &p;
        }
        return nullptr;
    };

    SweepResult out;
    for (const auto& scheme : spec.schemes) {
        for (double snr : scheme.snr_db) {
            if (const PointResult* k = find_known(scheme.label, snr)) {
                out.points.push_back(*k);
                continue;
            }
            out.points.push_back(run_point(scheme, snr, spec));
            if (on_point) on_point(out);
        }
    }
    return out;
}

std::string to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "scheme,snr_db,snr_inner_db,ebn0_db,frames,ldpc_bits,ldpc_errors,shaping_bits,"
          "shaping_errors,frame_errors,info_bits,info_errors,ber_ldpc,ber_shaping,ber,fer,"
          "ci95_ber,tx_power_mean,stop\n";
    for (const auto& p : result.points) {
        os << p.scheme << ',' << fmt_double(p.snr_db) << ',' << fmt_double(p.snr_inner_db)
           << ',' << fmt_double(p.ebn0_db) << ',' << p.frames << ',' << p.ldpc_bits << ','
           << p.ldpc_errors << ',' << p.shaping_bits << ',' << p.shaping_errors << ','
           << p.frame_errors << ',' << p.info_bits() << ','
           << p.info_errors() << ',' << fmt_double(p.ber_ldpc()) << ','
           << fmt_double(p.ber_shaping()) << ',' << fmt_double(p.ber()) << ','
           << fmt_double(p.fer()) << ',' << fmt_double(p.ci95_ber()) << ','
           << fmt_double(p.tx_power_mean) << ',' << p.stop << '\n';
    }
    return os.str();
}

SweepResult parse_csv(std::istream& in) {
    SweepResult res;
    std::string line;
    if (!std::getline(in, line)) throw IoError("csv: empty file");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) f.push_back(tok);
        if (f.size() != 19) throw IoError("csv: malformed row: " + line);
        PointResult p;
        p.scheme = f[0];
        p.snr_db = std::stod(f[1]);
        p.snr_inner_db = std::stod(f[2]);
        p.ebn0_db = std::stod(f[3]);
        p.frames = std::stoll(f[4]);
        p.ldpc_bits = std::stoll(f[5]);
        p.ldpc_errors = std::stoll(f[6]);
        p.shaping_bits = std::stoll(f[7]);
        p.shaping_errors = std::stoll(f[8]);
        p.frame_errors = std::stoll(f[9]);
        p.tx_power_mean = std::stod(f[17]);
        p.stop = f[18];
        res.points.push_back(std::move(p));
    }
    return res;
}

namespace {

struct PlotTransform {
    double x0, x1, y0_log, y1_log;
    double px0, px1, py0, py1; // pixel box (py0 = bottom)

    double x(double v) const { return px0 + (v - x0) / (x1 - x0) * (px1 - px0); }
    double y(double ber) const {
        const double l = std::log10(ber);
        return py0 - (l - y0_log) / (y1_log - y0_log) * (py0 - py1);
    }
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

} // namespace

void emit_plot(const std::vector<PlotCurve>& curves, const std::string& path) {
    if (curves.empty()) throw ConfigError("plot: no curves");

    double xmin = 1e300, xmax = -1e300, bmin = 1.0, bmax = 0.0;
    bool any = false;
    for (const auto& c : curves) {
        for (auto [x, b] : c.points) {
            if (b <= 0.0) continue; // zero-error points cannot sit on a log axis
            any = true;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            bmin = std::min(bmin, b);
            bmax = std::max(bmax, b);
        }
    }
    if (!any) throw ConfigError("plot: no nonzero BER points to draw");
    if (xmax - xmin < 1e-9) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    const int dec_lo = static_cast<int>(std::floor(std::log10(bmin)));
    const int dec_hi = static_cast<int>(std::ceil(std::log10(bmax)));

    PlotTransform t;
    t.x0 = xmin;
    t.x1 = xmax;
    t.y0_log = dec_lo;
    t.y1_log = std::max(dec_hi, dec_lo + 1);
    t.px0 = 70;
    t.px1 = 680;
    t.py0 = 460;
    t.py1 = 40;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"520\" "
          "viewBox=\"0 0 720 520\">\n"
       << "<rect width=\"720\" height=\"520\" fill=\"white\"/>\n";

    // decade gridlines + y labels
    for (int d = dec_lo; d <= static_cast<int>(t.y1_log); ++d) {
        const double py = t.y(std::pow(10.0, d));
        os << "<line x1=\"" << t.px0 << "\" y1=\"" << py << "\" x2=\"" << t.px1 << "\" y2=\""
           << py << "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << t.px0 - 8 << "\" y=\"" << py + 4
           << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">1e" << d
           << "</text>\n";
    }
    // x ticks at integer dB steps (coarsened if the span is wide)
    const int step = (xmax - xmin) > 16 ? 2 : 1;
    for (int v = static_cast<int>(std::ceil(xmin)); v <= static_cast<int>(std::floor(xmax));
         v += step) {
        const double px = t.x(v);
        os << "<line x1=\"" << px << "\" y1=\"" << t.py0 << "\" x2=\"" << px << "\" y2=\""
           << t.py0 + 5 << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
        os << "<text x=\"" << px << "\" y=\"" << t.py0 + 20
           << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" << v
           << "</text>\n";
    }
    // axes
    os << "<line x1=\"" << t.px0 << "\" y1=\"" << t.py0 << "\" x2=\"" << t.px1 << "\" y2=\""
       << t.py0 << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<line x1=\"" << t.px0 << "\" y1=\"" << t.py0 << "\" x2=\"" << t.px0 << "\" y2=\""
       << t.py1 << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << (t.px0 + t.px1) / 2 << "\" y=\"500\" font-size=\"14\" "
          "text-anchor=\"middle\" font-family=\"sans-serif\">Es/N0 (dB)</text>\n";
    os << "<text x=\"18\" y=\"" << (t.py0 + t.py1) / 2
       << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "transform=\"rotate(-90 18 "
       << (t.py0 + t.py1) / 2 << ")\">BER</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const char* color = kPalette[ci % 6];
        std::ostringstream pts;
        for (auto [x, b] : curves[ci].points) {
            if (b <= 0.0) continue;
            pts << t.x(x) << ',' << t.y(b) << ' ';
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
           << pts.str() << "\"/>\n";
        for (auto [x, b] : curves[ci].points) {
            if (b <= 0.0) continue;
            os << "<circle cx=\"" << t.x(x) << "\" cy=\"" << t.y(b) << "\" r=\"3.5\" fill=\""
               << color << "\"/>\n";
        }
        // legend entry
        const double ly = 56 + 22 * static_cast<double>(ci);
        os << "<line x1=\"520\" y1=\"" << ly << "\" x2=\"550\" y2=\"" << ly << "\" stroke=\""
           << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"556\" y=\"" << ly + 4
           << "\" font-size=\"12\" font-family=\"sans-serif\">" << curves[ci].label
           << "</text>\n";
    }
    os << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw IoError("plot: cannot write " + path);
    out << os.str();
    if (!out) throw IoError("plot: write failed for " + path);
}

} // namespace ringshape
