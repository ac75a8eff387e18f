#include "ibexp/wak_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ibexp/errors.hpp"

namespace ibexp {

namespace {

std::vector<double> joint_table(const SourceModel& model, int n, std::uint64_t NX, std::uint64_t NY) {
    const int nx = static_cast<int>(model.nx()), ny = static_cast<int>(model.ny());
    std::vector<double> t(NX * NY);
    for (std::uint64_t xi = 0; xi < NX; ++xi) {
        Seq x = seq_from_index(xi, n, nx);
        for (std::uint64_t yi = 0; yi < NY; ++yi) {
            Seq y = seq_from_index(yi, n, ny);
            double p = 1.0;
            for (int i = 0; i < n; ++i) p *= model.p_xy()(x[i], y[i]);
            t[xi * NY + yi] = p;
        }
    }
    return t;
}

}  // namespace

void HelperBothSidesCode::validate() const {
    std::uint64_t NX = checked_pow(nx, n, 1000000), NY = checked_pow(ny, n, 1000000);
    require(helper_labels >= 1 && messages >= 1, "label counts must be >= 1");
    require(helper.size() == NY, "helper table must have |Y|^n entries");
    require(tx.size() == NX * helper_labels, "transmitter table must have |X|^n * L entries");
    require(dec.size() == static_cast<std::size_t>(messages) * helper_labels, "decoder must cover messages x helper labels");
    for (int l : helper) require(l >= 0 && l < helper_labels, "helper label out of range");
    for (int m : tx) require(m >= 0 && m < messages, "message out of range");
    for (auto x : dec) require(x < NX, "decoded sequence out of range");
}

void IbCode::validate() const {
    std::uint64_t NX = checked_pow(nx, n, 1000000), NY = checked_pow(ny, n, 1000000);
    require(labels >= 1, "label count must be >= 1");
    require(encoder.size() == NY, "encoder table must have |Y|^n entries");
    require(lists.size() == static_cast<std::size_t>(labels), "one list per label");
    for (int l : encoder) require(l >= 0 && l < labels, "label out of range");
    for (auto& L : lists) {
        require(L.size() <= list_cap, "list exceeds its size bound");
        for (auto x : L) require(x < NX, "listed sequence out of range");
        auto s = L;
        std::sort(s.begin(), s.end());
        require(std::adjacent_find(s.begin(), s.end()) == s.end(), "list entries must be distinct");
    }
}

IbCode helper_to_ib(const HelperBothSidesCode& c) {
    c.validate();
    IbCode out;
    out.n = c.n;
    out.nx = c.nx;
    out.ny = c.ny;
    out.labels = c.helper_labels;
    out.list_cap = static_cast<std::uint64_t>(c.messages);
    out.encoder = c.helper;
    out.lists.resize(c.helper_labels);
    for (int l = 0; l < c.helper_labels; ++l)
        for (int m = 0; m < c.messages; ++m) {
            auto x = c.dec[static_cast<std::size_t>(m) * c.helper_labels + l];
            auto& L = out.lists[l];
            if (std::find(L.begin(), L.end(), x) == L.end()) L.push_back(x);
        }
    return out;
}

HelperBothSidesCode ib_to_helper(const IbCode& code, const SourceModel* model) {
    code.validate();
    const std::uint64_t NX = checked_pow(code.nx, code.n, 1000000), NY = checked_pow(code.ny, code.n, 1000000);
    HelperBothSidesCode c;
    c.n = code.n;
    c.nx = code.nx;
    c.ny = code.ny;
    c.helper_labels = code.labels;
    c.messages = static_cast<int>(std::max<std::uint64_t>(code.list_cap, 1));
    c.helper = code.encoder;
    c.tx.assign(NX * c.helper_labels, 0);
    c.dec.assign(static_cast<std::size_t>(c.messages) * c.helper_labels, 0);
    std::vector<double> joint;
    if (model) joint = joint_table(*model, code.n, NX, NY);
    for (int l = 0; l < code.labels; ++l) {
        auto L = code.lists[l];
        if (model) {
            std::vector<double> post(NX, 0.0);
            for (std::uint64_t yi = 0; yi < NY; ++yi)
                if (code.encoder[yi] == l)
                    for (auto x : L) post[x] += joint[x * NY + yi];
            std::sort(L.begin(), L.end(), [&](auto a, auto b) { return post[a] > post[b] || (post[a] == post[b] && a < b); });
        }
        for (std::size_t m = 0; m < L.size(); ++m) {
            c.tx[L[m] * c.helper_labels + l] = static_cast<int>(m);
            c.dec[m * c.helper_labels + l] = L[m];
        }
        // unused messages repeat the first listed sequence
        for (std::size_t m = L.size(); m < static_cast<std::size_t>(c.messages); ++m)
            c.dec[m * c.helper_labels + l] = L.empty() ? 0 : L[0];
    }
    return c;
}

double helper_error(const HelperBothSidesCode& c, const SourceModel& model) {
    c.validate();
    const std::uint64_t NX = checked_pow(c.nx, c.n, 1000000), NY = checked_pow(c.ny, c.n, 1000000);
    auto joint = joint_table(model, c.n, NX, NY);
    double err = 0.0;
    for (std::uint64_t xi = 0; xi < NX; ++xi)
        for (std::uint64_t yi = 0; yi < NY; ++yi) {
            int l = c.helper[yi];
            int m = c.tx[xi * c.helper_labels + l];
            if (c.dec[static_cast<std::size_t>(m) * c.helper_labels + l] != xi) err += joint[xi * NY + yi];
        }
    return err;
}

double ib_error(const IbCode& code, const SourceModel& model) {
    code.validate();
    const std::uint64_t NX = checked_pow(code.nx, code.n, 1000000), NY = checked_pow(code.ny, code.n, 1000000);
    auto joint = joint_table(model, code.n, NX, NY);
    double err = 0.0;
    for (std::uint64_t yi = 0; yi < NY; ++yi) {
        const auto& L = code.lists[code.encoder[yi]];
        for (std::uint64_t xi = 0; xi < NX; ++xi)
            if (std::find(L.begin(), L.end(), xi) == L.end()) err += joint[xi * NY + yi];
    }
    return err;
}

IbCode optimal_ib_code(const std::vector<int>& encoder, int labels, const SourceModel& model, int n, double R) {
    IbCode c;
    c.n = n;
    c.nx = static_cast<int>(model.nx());
    c.ny = static_cast<int>(model.ny());
    c.labels = labels;
    BigInt cap = list_cap(n, R);
    std::uint64_t NX = checked_pow(c.nx, n, 1000000);
    c.list_cap = cap >= BigInt(NX) ? NX : static_cast<std::uint64_t>(cap);
    c.encoder = encoder;
    OptimalDecoder d = optimal_decoder(encoder, model, n, R);
    c.lists = d.lists;
    c.lists.resize(labels);
    return c;
}

HelperBothSidesCode embed_wak(int n, int nx, int ny, int helper_labels, int messages, const std::vector<int>& helper,
                              const std::vector<int>& tx_x_only, const std::vector<std::uint64_t>& dec) {
    HelperBothSidesCode c;
    c.n = n;
    c.nx = nx;
    c.ny = ny;
    c.helper_labels = helper_labels;
    c.messages = messages;
    c.helper = helper;
    c.dec = dec;
    for (int m : tx_x_only)
        for (int l = 0; l < helper_labels; ++l) c.tx.push_back(m);
    c.validate();
    return c;
}

EquivalenceReport verify_equivalence(const SourceModel& model, int n, double R, double B, int trials,
                                     std::uint64_t seed) {
    const int nx = static_cast<int>(model.nx()), ny = static_cast<int>(model.ny());
    const std::uint64_t NX = checked_pow(nx, n, 1000000), NY = checked_pow(ny, n, 1000000);
    if (static_cast<double>(NX) * static_cast<double>(NY) > 1e6) throw SizeCapExceeded("|X|^n |Y|^n exceeds 1e6");
    BigInt Mb = list_cap(n, R), Lb = list_cap(n, B);
    require(Mb >= 1 && Lb >= 1, "R and B must allow at least one message and one helper label");
    // message budget = list budget = floor(e^{nR}); helper labels = floor(e^{nB})
    const int M = static_cast<int>(std::min<BigInt>(Mb, BigInt(NX)));
    const int L = static_cast<int>(std::min<BigInt>(Lb, BigInt(NY)));

    EquivalenceReport rep;
    auto note = [&](double d) { rep.max_discrepancy = std::max(rep.max_discrepancy, std::fabs(d)); };
    auto check_helper = [&](const HelperBothSidesCode& c) {
        double lam = helper_error(c, model);
        IbCode ib = helper_to_ib(c);
        double eib = ib_error(ib, model);
        rep.max_dominance_violation = std::max(rep.max_dominance_violation, eib - lam);
        note(helper_error(ib_to_helper(ib, &model), model) - eib);
        IbCode opt = optimal_ib_code(c.helper, L, model, n, R);
        double eopt = ib_error(opt, model);
        note(helper_error(ib_to_helper(opt, &model), model) - eopt);
        note(eopt - optimal_decoder(c.helper, model, n, R).p_e);
        rep.max_dominance_violation = std::max(rep.max_dominance_violation, eopt - lam);
        ++rep.codes_checked;
        return lam;
    };

    const double full = std::pow(static_cast<double>(L), static_cast<double>(NY)) *
                        std::pow(static_cast<double>(M), static_cast<double>(NX * L)) *
                        std::pow(static_cast<double>(NX), static_cast<double>(M * L));
    if (trials <= 0) {
        if (full > 1e6) throw SizeCapExceeded("complete code space exceeds 1e6 codes");
        rep.exhaustive = true;
        // mixed-radix odometer over (helper, tx, dec)
        std::vector<int> digits, radix;
        for (std::uint64_t i = 0; i < NY; ++i) radix.push_back(L);
        for (std::uint64_t i = 0; i < NX * L; ++i) radix.push_back(M);
        for (int i = 0; i < M * L; ++i) radix.push_back(static_cast<int>(NX));
        digits.assign(radix.size(), 0);
        double best_helper = 1.0;
        std::vector<double> best_ib(1, 1.0);
        while (true) {
            HelperBothSidesCode c;
            c.n = n, c.nx = nx, c.ny = ny, c.helper_labels = L, c.messages = M;
            std::size_t k = 0;
            for (std::uint64_t i = 0; i < NY; ++i) c.helper.push_back(digits[k++]);
            for (std::uint64_t i = 0; i < NX * L; ++i) c.tx.push_back(digits[k++]);
            for (int i = 0; i < M * L; ++i) c.dec.push_back(static_cast<std::uint64_t>(digits[k++]));
            best_helper = std::min(best_helper, check_helper(c));
            best_ib[0] = std::min(best_ib[0], optimal_decoder(c.helper, model, n, R).p_e);
            std::size_t j = 0;
            while (j < digits.size() && ++digits[j] == radix[j]) digits[j++] = 0;
            if (j == digits.size()) break;
        }
        note(best_helper - best_ib[0]);
    } else {
        std::mt19937_64 rng(seed);
        for (int t = 0; t < trials; ++t) {
            HelperBothSidesCode c;
            c.n = n, c.nx = nx, c.ny = ny, c.helper_labels = L, c.messages = M;
            for (std::uint64_t i = 0; i < NY; ++i) c.helper.push_back(static_cast<int>(rng() % L));
            for (std::uint64_t i = 0; i < NX * L; ++i) c.tx.push_back(static_cast<int>(rng() % M));
            for (int i = 0; i < M * L; ++i) c.dec.push_back(rng() % NX);
            check_helper(c);
            // random IB code of the same budgets
            IbCode ib;
            ib.n = n, ib.nx = nx, ib.ny = ny, ib.labels = L, ib.list_cap = M;
            for (std::uint64_t i = 0; i < NY; ++i) ib.encoder.push_back(static_cast<int>(rng() % L));
            ib.lists.resize(L);
            for (auto& list : ib.lists) {
                std::vector<std::uint64_t> all(NX);
                for (std::uint64_t i = 0; i < NX; ++i) all[i] = i;
                std::shuffle(all.begin(), all.end(), rng);
                all.resize(1 + rng() % static_cast<std::uint64_t>(M));
                list = all;
            }
            double e = ib_error(ib, model);
            note(helper_error(ib_to_helper(ib), model) - e);
            note(ib_error(helper_to_ib(ib_to_helper(ib)), model) - e);
        }
    }
    rep.ok = rep.max_discrepancy <= 1e-12 && rep.max_dominance_violation <= 1e-12;
    return rep;
}

}  // namespace ibexp
