#ifndef FDQRANK_H
#define FDQRANK_H

/* C interface to the fdqrank library. Every call returns an fdq_status; on
 * failure fdq_last_error() describes the problem (per thread). Strings
 * returned through char** are owned by the caller and released with
 * fdq_string_free. */

#include <stddef.h>

#if defined(FDQ_BUILDING_LIBRARY)
#define FDQ_API __attribute__((visibility("default")))
#else
#define FDQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdq_status {
  FDQ_OK = 0,
  FDQ_ERR_USAGE = 1,     /* bad arguments, parse or load failures */
  FDQ_ERR_RESOURCE = 2,  /* degree, term or dimension cap exceeded */
  FDQ_ERR_NUMERICAL = 3  /* numerical backend failure */
} fdq_status;

typedef struct fdq_presentation fdq_presentation;
typedef struct fdq_relations fdq_relations;
typedef struct fdq_representation fdq_representation;

FDQ_API const char* fdq_version(void);
FDQ_API const char* fdq_last_error(void);
FDQ_API void fdq_string_free(char* s);

FDQ_API fdq_status fdq_presentation_load(const char* path, fdq_presentation** out);
FDQ_API fdq_status fdq_presentation_parse(const char* text, fdq_presentation** out);
FDQ_API void fdq_presentation_free(fdq_presentation* p);
/* Generator and relator counts. */
FDQ_API fdq_status fdq_presentation_shape(const fdq_presentation* p, size_t* m, size_t* relators);

FDQ_API fdq_status fdq_relations_build(const fdq_presentation* p, fdq_relations** out);
FDQ_API void fdq_relations_free(fdq_relations* r);
FDQ_API fdq_status fdq_relations_shape(const fdq_relations* r, size_t* k, size_t* n);
FDQ_API fdq_status fdq_relations_text(const fdq_relations* r, char** out);
FDQ_API fdq_status fdq_jacobian_text(const fdq_relations* r, char** out);

/* descriptor: cyclic:N, torus:N, regular-cyclic:k, randperm:N:seed, file:PATH.
 * m is the generator count of the target presentation. */
FDQ_API fdq_status fdq_representation_create(const char* descriptor, size_t m, fdq_representation** out);
FDQ_API void fdq_representation_free(fdq_representation* rep);
FDQ_API fdq_status fdq_representation_dim(const fdq_representation* rep, size_t* dim);

/* Writes up to cap defects; *count receives the relator count. */
FDQ_API fdq_status fdq_relator_defects(const fdq_representation* rep, const fdq_presentation* p, double* out,
                                       size_t cap, size_t* count);

/* Normalized rank of dF(X); threshold is "plateau" or "fixed:<relative>"
 * (NULL means plateau). */
FDQ_API fdq_status fdq_rank(const fdq_relations* r, const fdq_representation* rep, const char* threshold,
                            double* rank);

/* Runs a sweep described by a JSON config and returns the JSON report.
 * Returns FDQ_OK when at least one job succeeded; when every job fails the
 * status of the first failure is returned and *report_json still holds the
 * report. */
FDQ_API fdq_status fdq_run(const char* config_json, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
