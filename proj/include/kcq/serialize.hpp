#pragma once

// JSON forms of configs, outcomes and reports. Numbers are rounded to nine
// significant digits before they are stored.

#include <cstdlib>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "kcq/adversary.hpp"
#include "kcq/analysis.hpp"
#include "kcq/info.hpp"
#include "kcq/protocol.hpp"

namespace kcq {

using json = nlohmann::ordered_json;

inline double sig9(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

namespace detail {

inline void require_exact_keys(const json& j, const std::set<std::string>& keys, const char* what) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!keys.contains(k)) throw std::invalid_argument(std::string("unknown field '") + k + "' in " + what);
    for (const auto& k : keys)
        if (!j.contains(k)) throw std::invalid_argument(std::string("missing field '") + k + "' in " + what);
}

inline json estimate_json(const Estimate& e) { return {{"estimate", sig9(e.value)}, {"half_width", sig9(e.half_width)}}; }

inline json optional_number(const std::optional<double>& v) { return v ? json(sig9(*v)) : json(nullptr); }

}  // namespace detail

inline const char* to_string(Mode m) { return m == Mode::key_generation ? "key-generation" : "direct-encryption"; }
inline const char* to_string(BitLabeling l) { return l == BitLabeling::fixed ? "fixed" : "alternating"; }

/// Config document:
///   {"n", "alphabet": {"m", "labeling"?}, "keystream": {"kind", "lfsr"?, "seed"},
///    "channel": {"p_c", "loss"}, "code_rate", "pa_security_param",
///    "verification_len", "mode"}
/// Seeds are '0'/'1' strings, first character = register stage 1.
inline ProtocolConfig config_from_json(const json& j) {
    detail::require_exact_keys(j, {"n", "alphabet", "keystream", "channel", "code_rate", "pa_security_param",
                                   "verification_len", "mode"},
                               "config");
    ProtocolConfig c;
    c.n = j.at("n").get<std::size_t>();

    const json& a = j.at("alphabet");
    if (!a.is_object() || !a.contains("m")) throw std::invalid_argument("alphabet needs field 'm'");
    for (const auto& [k, v] : a.items())
        if (k != "m" && k != "labeling") throw std::invalid_argument("unknown field '" + k + "' in alphabet");
    BitLabeling labeling = BitLabeling::alternating;
    if (a.contains("labeling")) {
        const auto l = a.at("labeling").get<std::string>();
        if (l == "fixed") labeling = BitLabeling::fixed;
        else if (l != "alternating") throw std::invalid_argument("labeling must be 'fixed' or 'alternating'");
    }
    c.alphabet = BasisAlphabet(a.at("m").get<std::uint32_t>(), labeling);

    const json& ks = j.at("keystream");
    const auto kind = ks.at("kind").get<std::string>();
    if (kind == "lfsr") {
        detail::require_exact_keys(ks, {"kind", "lfsr", "seed"}, "keystream");
        c.keystream = KeystreamConfig::make_lfsr(LfsrSpec::parse(ks.at("lfsr").get<std::string>()),
                                                 SeedKey::parse(ks.at("seed").get<std::string>()));
    } else if (kind == "repetition") {
        detail::require_exact_keys(ks, {"kind", "seed"}, "keystream");
        c.keystream = KeystreamConfig::make_repetition(SeedKey::parse(ks.at("seed").get<std::string>()));
    } else {
        throw std::invalid_argument("keystream kind must be 'lfsr' or 'repetition'");
    }

    const json& ch = j.at("channel");
    detail::require_exact_keys(ch, {"p_c", "loss"}, "channel");
    c.channel.flip_probability = ch.at("p_c").get<double>();
    c.channel.loss = ch.at("loss").get<double>();

    c.code_rate = j.at("code_rate").get<double>();
    c.pa_security_bits = j.at("pa_security_param").get<std::size_t>();
    c.verification_len = j.at("verification_len").get<std::size_t>();
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "key-generation") c.mode = Mode::key_generation;
    else if (mode == "direct-encryption") c.mode = Mode::direct_encryption;
    else throw std::invalid_argument("mode must be 'key-generation' or 'direct-encryption'");

    c.validate();
    return c;
}

inline json to_json(const ProtocolConfig& c) {
    json ks = {{"kind", c.keystream.kind == KeystreamConfig::Kind::lfsr ? "lfsr" : "repetition"}};
    if (c.keystream.lfsr) ks["lfsr"] = c.keystream.lfsr->to_string();
    ks["seed"] = c.keystream.seed.to_string();
    return {
        {"n", c.n},
        {"alphabet", {{"m", c.alphabet.m()}, {"labeling", to_string(c.alphabet.labeling())}}},
        {"keystream", ks},
        {"channel", {{"p_c", sig9(c.channel.flip_probability)}, {"loss", sig9(c.channel.loss)}}},
        {"code_rate", sig9(c.code_rate)},
        {"pa_security_param", c.pa_security_bits},
        {"verification_len", c.verification_len},
        {"mode", to_string(c.mode)},
    };
}

inline json to_json(const KeyLedger& l) {
    return {{"consumed_seed", l.consumed_seed},
            {"consumed_verification", l.consumed_verification},
            {"generated", l.generated},
            {"net", l.net()}};
}

/// Keys are hex (MSB first) with explicit bit lengths. Detected positions are
/// summarized by their count.
inline json to_json(const ProtocolOutcome& o) {
    return {
        {"verified", o.verified},
        {"abort_reason", o.abort_reason ? json(*o.abort_reason) : json(nullptr)},
        {"rate_verdict", to_string(o.rate_verdict)},
        {"key_bits", o.alice_key.size()},
        {"alice_key", bits_to_hex(o.alice_key)},
        {"bob_key", bits_to_hex(o.bob_key)},
        {"qber_raw", sig9(o.qber_raw)},
        {"qber_estimate", sig9(o.qber_estimate)},
        {"qber_sample_size", o.sample_size},
        {"detected_count", o.detected_positions.size()},
        {"reconciled_length", o.reconciled_length},
        {"leaked_bits", o.leaked_bits},
        {"ledger", to_json(o.ledger)},
    };
}

inline json to_json(const DirectEncryptionResult& r, std::span<const Bit> plaintext) {
    return {
        {"success", r.success()},
        {"decoded", r.decoded},
        {"authenticated", r.authenticated},
        {"plaintext_bits", plaintext.size()},
        {"plaintext", bits_to_hex(plaintext)},
        {"recovered", bits_to_hex(r.recovered)},
        {"channel_error_rate", sig9(r.channel_error_rate)},
        {"qubits_sent", r.ciphertext.size()},
        {"detected_count", r.detected_positions.size()},
    };
}

inline json to_json(const AttackReport& r) {
    const auto& c = r.counts;
    return {
        {"strategy", r.strategy},
        {"trials", c.trials},
        {"eve_bit_error", {{"analytic", detail::optional_number(r.eve_bit_error_analytic)},
                           {"mc", detail::estimate_json(r.eve_bit_error)},
                           {"samples", c.eve_bits}}},
        {"induced_qber", {{"analytic", detail::optional_number(r.induced_qber_analytic)},
                          {"mc", detail::estimate_json(r.induced_qber)},
                          {"samples", c.user_bits}}},
        {"success_probability",
         {{"analytic", detail::optional_number(r.success_probability_analytic)},
          {"mc", r.success_probability ? detail::estimate_json(*r.success_probability) : json(nullptr)},
          {"successes", c.successes}}},
        {"info_fraction", detail::optional_number(r.info_fraction)},
        {"errors_in_successful_trials", c.success_errors},
    };
}

inline json to_json(const RateWindow& w) {
    return {{"p_c", sig9(w.p_c)}, {"lower", sig9(w.lower)}, {"upper", sig9(w.upper)}, {"nonempty", w.nonempty}};
}

}  // namespace kcq
