#ifndef TAO_MEMRISTOR_H
#define TAO_MEMRISTOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TaoStatus {
  TAO_STATUS_OK = 0,
  TAO_STATUS_NULL_POINTER = 1,
  TAO_STATUS_DOMAIN = 2,
  TAO_STATUS_OVERFLOW = 3,
  TAO_STATUS_INVALID_BRACKET = 4,
  TAO_STATUS_RANGE = 5,
  TAO_STATUS_INTEGRATION = 6,
  TAO_STATUS_TOO_SHORT = 7,
  TAO_STATUS_INVALID_PARAMETER = 8,
  TAO_STATUS_UNKNOWN_FIELD = 9,
  TAO_STATUS_PANIC = 10,
} TaoStatus;

typedef enum TaoStability {
  TAO_STABILITY_STABLE = 1,
  TAO_STABILITY_UNSTABLE = -1,
} TaoStability;

typedef enum TaoSaddleNode {
  TAO_SADDLE_NODE_CREATION = 0,
  TAO_SADDLE_NODE_ANNIHILATION = 1,
} TaoSaddleNode;

typedef enum TaoBoundaryHit {
  TAO_BOUNDARY_HIT_NONE = 0,
  TAO_BOUNDARY_HIT_UPPER = 1,
  TAO_BOUNDARY_HIT_LOWER = 2,
} TaoBoundaryHit;

/**
 * Fixed points of one drive, ascending in x.
 */
typedef struct TaoFixedPointList TaoFixedPointList;

/**
 * Model parameter set.
 */
typedef struct TaoModel TaoModel;

/**
 * Recorded pulse-edge samples of a simulation.
 */
typedef struct TaoTrajectory TaoTrajectory;

/**
 * Rectangular pulse train: amplitudes in volts, widths and period in seconds.
 */
typedef struct TaoDrive {
  double v_plus;
  double v_minus;
  double tau_plus;
  double tau_minus;
  double period;
} TaoDrive;

typedef struct TaoScan {
  double x_lo;
  double x_hi;
  size_t n_grid;
  double refine_tol;
} TaoScan;

typedef struct TaoIntegrator {
  double max_rel_step;
  size_t max_substeps_per_pulse;
} TaoIntegrator;

typedef struct TaoFixedPoint {
  double x;
  enum TaoStability stability;
  double bracket_lo;
  double bracket_hi;
  double residual_log;
} TaoFixedPoint;

typedef struct TaoCusp {
  double x_c;
  double v_plus;
  double v_minus;
} TaoCusp;

typedef struct TaoCurvePoint {
  double v_plus;
  double v_minus;
} TaoCurvePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tao_version(void);

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *tao_last_error_message(void);

struct TaoDrive tao_drive_default(void);

struct TaoScan tao_scan_default(void);

struct TaoIntegrator tao_integrator_default(void);

/**
 * New model with the default parameter set. Release with [`tao_model_free`].
 */
struct TaoModel *tao_model_new(void);

/**
 * # Safety
 * `model` must come from [`tao_model_new`] and not be used afterwards.
 */
void tao_model_free(struct TaoModel *model);

/**
 * Sets a parameter by name (`rate_off`, `rate_on`, `sigma_off`, `sigma_on`,
 * `sigma_p`, `x_off`, `x_on`, `beta`, `g_m`, `a`, `b`). Values must be
 * finite and positive.
 *
 * # Safety
 * `model` must be a live handle and `name` a NUL-terminated string.
 */
enum TaoStatus tao_model_set(struct TaoModel *model, const char *name, double value);

/**
 * # Safety
 * `model` must be a live handle, `name` a NUL-terminated string and `out`
 * writable.
 */
enum TaoStatus tao_model_get(const struct TaoModel *model, const char *name, double *out);

/**
 * Memductance `G(x, v)` in siemens.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TaoStatus tao_memductance(const struct TaoModel *model, double x, double v, double *out);

/**
 * State evolution rate `f(x, v)` in 1/s; fails with overflow where the
 * linear value is not representable.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum TaoStatus tao_evolution_rate(const struct TaoModel *model, double x, double v, double *out);

/**
 * Sign (−1, 0, +1) and natural log of the magnitude of `f(x, v)`.
 *
 * # Safety
 * `model` must be a live handle; `sign` and `log_magnitude` writable.
 */
enum TaoStatus tao_log_evolution_rate(const struct TaoModel *model,
                                      double x,
                                      double v,
                                      int32_t *sign,
                                      double *log_magnitude);

/**
 * Period-averaged rate `g(x)` in 1/s.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_effective_g(const struct TaoModel *model,
                               const struct TaoDrive *drive,
                               double x,
                               double *out);

/**
 * Overflow-safe sign of `g(x)`.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_g_sign(const struct TaoModel *model,
                          const struct TaoDrive *drive,
                          double x,
                          int32_t *out);

/**
 * Fixed points of `g` for one drive. Release the list with
 * [`tao_fixed_point_list_free`].
 *
 * # Safety
 * `model`, `drive`, `scan` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_find_fixed_points(const struct TaoModel *model,
                                     const struct TaoDrive *drive,
                                     const struct TaoScan *scan,
                                     struct TaoFixedPointList **out);

/**
 * # Safety
 * `list` must be a live list handle or null.
 */
size_t tao_fixed_point_list_len(const struct TaoFixedPointList *list);

/**
 * # Safety
 * `list` must be a live list handle and `out` writable.
 */
enum TaoStatus tao_fixed_point_list_get(const struct TaoFixedPointList *list,
                                        size_t index,
                                        struct TaoFixedPoint *out);

/**
 * # Safety
 * `list` must come from [`tao_find_fixed_points`] and not be used afterwards.
 */
void tao_fixed_point_list_free(struct TaoFixedPointList *list);

/**
 * Number of stable fixed points.
 *
 * # Safety
 * `model`, `drive`, `scan` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_count_stable(const struct TaoModel *model,
                                const struct TaoDrive *drive,
                                const struct TaoScan *scan,
                                size_t *out);

/**
 * `V−` of a saddle-node event at fixed `v_plus`, bisected inside
 * `[v_minus_lo, v_minus_hi]`. Only the widths and period of `drive` are used.
 *
 * # Safety
 * `model`, `drive`, `scan` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_saddle_node_threshold(const struct TaoModel *model,
                                         const struct TaoDrive *drive,
                                         double v_plus,
                                         enum TaoSaddleNode which,
                                         double v_minus_lo,
                                         double v_minus_hi,
                                         const struct TaoScan *scan,
                                         double *out);

/**
 * Cusp of the closed-form saddle-node curve.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_cusp(const struct TaoModel *model,
                        const struct TaoDrive *drive,
                        struct TaoCusp *out);

/**
 * Point of curve A at parameter `x`; `converged` iterates the amplitude
 * correction to convergence instead of applying it once.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_curve_a_point(const struct TaoModel *model,
                                 const struct TaoDrive *drive,
                                 double x,
                                 bool converged,
                                 struct TaoCurvePoint *out);

/**
 * Point of curve B at `v_plus`.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_curve_b_point(const struct TaoModel *model,
                                 const struct TaoDrive *drive,
                                 double v_plus,
                                 struct TaoCurvePoint *out);

/**
 * Point of curve C at `v_plus`; fails with `TAO_STATUS_RANGE` where the
 * curve does not exist.
 *
 * # Safety
 * `model` and `drive` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_curve_c_point(const struct TaoModel *model,
                                 const struct TaoDrive *drive,
                                 double v_plus,
                                 struct TaoCurvePoint *out);

/**
 * Point of curve D at `v_plus` and the state `x_min` it is built from.
 *
 * # Safety
 * `model` and `drive` must be valid pointers; `out` and `x_min` writable.
 */
enum TaoStatus tao_curve_d_point(const struct TaoModel *model,
                                 const struct TaoDrive *drive,
                                 double v_plus,
                                 struct TaoCurvePoint *out,
                                 double *x_min);

/**
 * Integrates `n_periods` pulse periods from `x0`. Release the result with
 * [`tao_trajectory_free`].
 *
 * # Safety
 * `model`, `drive`, `integrator` must be valid pointers and `out` writable.
 */
enum TaoStatus tao_simulate(const struct TaoModel *model,
                            const struct TaoDrive *drive,
                            double x0,
                            size_t n_periods,
                            const struct TaoIntegrator *integrator,
                            struct TaoTrajectory **out);

/**
 * Number of samples; `times` and `states` each hold this many values.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
size_t tao_trajectory_len(const struct TaoTrajectory *traj);

/**
 * Sample times in seconds, owned by the trajectory.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
const double *tao_trajectory_times(const struct TaoTrajectory *traj);

/**
 * State samples, owned by the trajectory.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
const double *tao_trajectory_states(const struct TaoTrajectory *traj);

/**
 * First edge of `[0, 1]` the state was clamped to.
 *
 * # Safety
 * `traj` must be a live handle or null.
 */
enum TaoBoundaryHit tao_trajectory_boundary_hit(const struct TaoTrajectory *traj);

/**
 * Mean and peak-to-peak amplitude over the trailing `tail_fraction` of
 * the periods.
 *
 * # Safety
 * `traj` must be a live handle; `mean` and `amplitude` writable.
 */
enum TaoStatus tao_trajectory_attractor(const struct TaoTrajectory *traj,
                                        double tail_fraction,
                                        double *mean,
                                        double *amplitude);

/**
 * # Safety
 * `traj` must come from [`tao_simulate`] and not be used afterwards.
 */
void tao_trajectory_free(struct TaoTrajectory *traj);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAO_MEMRISTOR_H */
