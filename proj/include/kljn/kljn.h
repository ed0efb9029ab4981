/*
 * C API of the KLJN cable-analysis toolkit.
 *
 * Conventions:
 *  - Objects are opaque handles created by kljn_*_create-style calls and
 *    released by the matching kljn_*_destroy; destroy accepts NULL.
 *  - Every fallible call returns a kljn_status; outputs are written only
 *    on KLJN_OK.  kljn_last_error() describes the most recent failure on
 *    the calling thread.
 *  - Units are strict SI (ohm, henry, farad, meter, hertz, second, volt,
 *    ampere, kelvin, joule); angles are radians.
 */
#ifndef KLJN_H
#define KLJN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(KLJN_BUILDING_SHARED)
#define KLJN_API __declspec(dllexport)
#else
#define KLJN_API __declspec(dllimport)
#endif
#else
#define KLJN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kljn_status {
  KLJN_OK = 0,
  KLJN_ERR_VALIDATION = 1, /* input violates a documented precondition */
  KLJN_ERR_NUMERIC = 2,    /* a numeric procedure could not deliver a result */
  KLJN_ERR_NULL_ARGUMENT = 3,
  KLJN_ERR_UNKNOWN = 4
} kljn_status;

/* Thread-local message for the most recent failing call; never NULL. */
KLJN_API const char* kljn_last_error(void);

/* Library version as "major.minor.patch". */
KLJN_API const char* kljn_version(void);

/* ---------------------------------------------------------------- cable */

typedef struct kljn_cable kljn_cable; /* opaque */

typedef struct kljn_cable_params {
  double inductance_per_meter;  /* H/m */
  double capacitance_per_meter; /* F/m */
  double resistance_per_meter;  /* ohm/m */
  double length;                /* m */
} kljn_cable_params;

typedef struct kljn_cable_info {
  double total_inductance;   /* L_c [H] */
  double total_capacitance;  /* C_c [F] */
  double total_resistance;   /* R_c [ohm] */
  double wave_velocity;      /* v_c [m/s] */
  double wave_impedance;     /* R_w [ohm] */
  double min_wave_frequency; /* f_min [Hz] */
} kljn_cable_info;

KLJN_API kljn_status kljn_cable_create(const kljn_cable_params* params, kljn_cable** out);
KLJN_API kljn_status kljn_cable_preset(const char* name, kljn_cable** out);
KLJN_API kljn_status kljn_cable_from_json(const char* json_text, kljn_cable** out);
KLJN_API void kljn_cable_destroy(kljn_cable* cable);

KLJN_API kljn_status kljn_cable_get_params(const kljn_cable* cable, kljn_cable_params* out);
KLJN_API kljn_status kljn_cable_derive(const kljn_cable* cable, kljn_cable_info* out);

/* Quasi-static admissibility: ok iff frequency <= margin * f_min.
 * Pass margin <= 0 for the default 0.01. */
KLJN_API kljn_status kljn_cable_quasi_static(const kljn_cable* cable, double frequency,
                                             double margin, int* admissible, double* ratio);

/* Writes the first n_max standing-wave mode frequencies n*v_c/(2D). */
KLJN_API kljn_status kljn_cable_mode_frequencies(const kljn_cable* cable, int n_max,
                                                 double* out_frequencies);

/* ------------------------------------------------------- wave reference */

/* Modes admitted below cutoff: mode_count = floor(cutoff / f_min).
 * KLJN-compliant cutoffs must report zero. */
KLJN_API kljn_status kljn_forbidden_band(const kljn_cable* cable, double cutoff,
                                         double* ratio, int* mode_count);

/* Exact lossless-line input impedance with a real far-end load
 * (INFINITY for an open line). */
KLJN_API kljn_status kljn_input_impedance(const kljn_cable* cable, double load,
                                          double frequency, double* re, double* im);

/* Resonances of the short-circuited line, n = 1..n_max. */
KLJN_API kljn_status kljn_shorted_resonances(const kljn_cable* cable, int n_max,
                                             double* out_frequencies);

/* Best single-velocity fit to a directional delay pair; the residual is
 * the irreducible misfit |tau_ab - tau_ba| / 2. */
KLJN_API kljn_status kljn_fit_single_velocity(double tau_toward_bob, double tau_toward_alice,
                                              double length, double* velocity,
                                              double* residual);

/* ----------------------------------------------------------- ac network */

typedef enum kljn_topology {
  KLJN_TOPOLOGY_LOSSLESS_L = 0,
  KLJN_TOPOLOGY_LOSSY_RL = 1,
  KLJN_TOPOLOGY_PI_RLC = 2,
  KLJN_TOPOLOGY_LADDER_N = 3
} kljn_topology;

typedef enum kljn_end { KLJN_END_ALICE = 0, KLJN_END_BOB = 1 } kljn_end;

typedef enum kljn_direction {
  KLJN_TOWARD_BOB = 0,
  KLJN_TOWARD_ALICE = 1
} kljn_direction;

typedef struct kljn_termination {
  double resistance_alice; /* ohm */
  double resistance_bob;   /* ohm */
  kljn_end drive_end;
  double drive_amplitude;  /* V */
} kljn_termination;

typedef struct kljn_phasor_solution {
  double frequency;
  double voltage_alice_end_re, voltage_alice_end_im;
  double voltage_bob_end_re, voltage_bob_end_im;
  double drop_u_ab_re, drop_u_ab_im;
  double loop_current_re, loop_current_im;
} kljn_phasor_solution;

/* segment_count applies to KLJN_TOPOLOGY_LADDER_N and is ignored otherwise. */
KLJN_API kljn_status kljn_solve_phasor(kljn_topology topology, int segment_count,
                                       const kljn_cable* cable,
                                       const kljn_termination* termination,
                                       double frequency, kljn_phasor_solution* out);

/* Far-end node phase relative to the drive end, in (-pi, pi]. */
KLJN_API kljn_status kljn_phase_shift(kljn_topology topology, int segment_count,
                                      const kljn_cable* cable,
                                      const kljn_termination* termination,
                                      double frequency, kljn_direction direction,
                                      double* phase);

/* Quasi-static one-way delay L_c / R_far. */
KLJN_API kljn_status kljn_time_delay(const kljn_cable* cable,
                                     const kljn_termination* termination,
                                     kljn_direction direction, double* tau);

/* Equivalent phase velocity 2*pi*f*D / |phase|; may exceed the speed of
 * light (steady-state phase quantity, not a signal velocity). */
KLJN_API kljn_status kljn_phase_velocity(kljn_topology topology, int segment_count,
                                         const kljn_cable* cable,
                                         const kljn_termination* termination,
                                         double frequency, kljn_direction direction,
                                         double* velocity);

typedef struct kljn_sweep kljn_sweep; /* opaque */

typedef struct kljn_sweep_row {
  double frequency;       /* Hz */
  double magnitude;       /* |U_AB| [V] at the given drive amplitude */
  double phase;           /* rad, wrapped to (-pi, pi] */
  double phase_unwrapped; /* rad, continuous along the sweep */
} kljn_sweep_row;

KLJN_API kljn_status kljn_ac_sweep(kljn_topology topology, int segment_count,
                                   const kljn_cable* cable,
                                   const kljn_termination* termination, double f_start,
                                   double f_stop, int points_per_decade, kljn_sweep** out);
KLJN_API size_t kljn_sweep_size(const kljn_sweep* sweep);
KLJN_API kljn_status kljn_sweep_get(const kljn_sweep* sweep, size_t index,
                                    kljn_sweep_row* out);
KLJN_API void kljn_sweep_destroy(kljn_sweep* sweep);

/* -------------------------------------------------------------- thermal */

typedef struct kljn_energy_budget {
  double electric_energy;  /* J */
  double magnetic_energy;  /* J */
  double per_mode_quota;   /* kT/2 [J] */
  double deficit_electric; /* electric / quota */
  double deficit_magnetic; /* magnetic / quota */
  double corner_electric;  /* f_0C [Hz] */
  double corner_magnetic;  /* f_0L [Hz] */
} kljn_energy_budget;

/* termination may be NULL for the matched cable (R_A = R_B = R_w).
 * numeric_method != 0 selects adaptive quadrature over the closed form. */
KLJN_API kljn_status kljn_thermal_budget(const kljn_cable* cable, double temperature,
                                         double noise_cutoff,
                                         const kljn_termination* termination,
                                         int numeric_method, kljn_energy_budget* out);

/* Quasi-static instantaneous E_e/E_m ratio (R_load / R_w)^2. */
KLJN_API kljn_status kljn_energy_ratio(const kljn_cable* cable, double load_resistance,
                                       double* ratio);

/* Planck intensity (4 pi h f^3 / c^2) / (e^{hf/kT} - 1). */
KLJN_API kljn_status kljn_planck_intensity(double frequency, double temperature,
                                           double* intensity);

/* ------------------------------------------------------- KLJN protocol */

typedef struct kljn_sim_params {
  double r_low;             /* R_L [ohm] */
  double r_high;            /* R_H [ohm] */
  double noise_temperature; /* T_eff [K] */
  double noise_cutoff;      /* f_c [Hz] */
  kljn_cable_params cable;
  double bit_period;        /* s */
  double sample_rate;       /* Hz */
  uint64_t rng_seed;
  int32_t bit_count;
} kljn_sim_params;

/* Fills the illustrative defaults (1 kOhm / 10 kOhm on the preset cable). */
KLJN_API void kljn_sim_params_defaults(kljn_sim_params* out);

/* Parses a JSON config (same keys as the C++ core); missing keys keep
 * their defaults. */
KLJN_API kljn_status kljn_sim_params_from_json(const char* json_text,
                                               kljn_sim_params* out);

typedef struct kljn_report kljn_report; /* opaque */

typedef struct kljn_report_summary {
  double legit_error_rate;
  double secure_fraction;
  double eve_hl_lh_pvalue;
  double eve_ll_hh_pvalue;
  double delay_toward_bob;   /* s */
  double delay_toward_alice; /* s */
} kljn_report_summary;

typedef struct kljn_bit_record {
  int32_t alice_high;       /* 1 if Alice chose R_H */
  int32_t bob_high;
  int32_t alice_decoded;    /* 0 = Low, 1 = High, 2 = Undecided */
  int32_t bob_decoded;
  int32_t secure;           /* choices differ */
  double mean_square_voltage;
  double mean_square_current;
} kljn_bit_record;

KLJN_API kljn_status kljn_run_exchange(const kljn_sim_params* params, kljn_report** out);
KLJN_API size_t kljn_report_bit_count(const kljn_report* report);
KLJN_API kljn_status kljn_report_get_summary(const kljn_report* report,
                                             kljn_report_summary* out);
KLJN_API kljn_status kljn_report_get_bit(const kljn_report* report, size_t index,
                                         kljn_bit_record* out);
KLJN_API void kljn_report_destroy(kljn_report* report);

/* Time-domain delay probe on the mixed loop (R_A = r_high, R_B = r_low).
 * probe_frequency = 0 selects the default tone. */
KLJN_API kljn_status kljn_delay_probe(const kljn_sim_params* params,
                                      kljn_direction direction, double probe_frequency,
                                      double* tau);

typedef struct kljn_trace kljn_trace; /* opaque */

/* Re-simulates one bit period deterministically (same noise as the
 * equally indexed bit of kljn_run_exchange under the same params). */
KLJN_API kljn_status kljn_simulate_bit(const kljn_sim_params* params, int alice_high,
                                       int bob_high, uint64_t bit_index, kljn_trace** out);
KLJN_API size_t kljn_trace_sample_count(const kljn_trace* trace);
KLJN_API kljn_status kljn_trace_sample_rate(const kljn_trace* trace, double* out);
/* channel: 0 = Alice-end voltage, 1 = Bob-end voltage, 2 = loop current.
 * The pointer stays valid until the trace is destroyed. */
KLJN_API kljn_status kljn_trace_channel(const kljn_trace* trace, int channel,
                                        const double** data);
KLJN_API void kljn_trace_destroy(kljn_trace* trace);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* KLJN_H */
