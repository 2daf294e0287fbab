/*
 * Copyright 2026 the spanqa authors.
 * Licensed under the Apache License, Version 2.0.
 *
 * C interface to the spanqa extractive question-answering pipeline.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return SQ_OK on success; on failure they return a status code
 * and leave a human-readable message in sq_last_error() (thread-local).
 * Strings returned through char** out-parameters are heap-allocated and
 * must be released with sq_string_free().
 */

#ifndef SPANQA_SPANQA_H_
#define SPANQA_SPANQA_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sq_status {
  SQ_OK = 0,
  SQ_ERR_USAGE = 1, /* invalid arguments, kind mismatches, shape errors */
  SQ_ERR_DATA = 2,  /* unreadable or malformed files */
  SQ_ERR_TRAIN = 3  /* training failures (non-finite loss or gradients) */
} sq_status;

const char* sq_version(void);

/* Message describing the most recent failure on the calling thread. */
const char* sq_last_error(void);

void sq_string_free(char* s);

/* -------- datasets -------- */

typedef struct sq_dataset sq_dataset;

/* format: "native" | "squad_v1" | "bioasq_factoid" | "quasar_t" */
sq_status sq_dataset_open(const char* path, const char* format, sq_dataset** out);

/* Writes the canonical native JSON form. */
sq_status sq_dataset_save(const sq_dataset* ds, const char* path);

/* mode: "rc" drops answer-free paragraphs, "openqa" labels them 0/1. */
sq_status sq_dataset_transform(const sq_dataset* ds, const char* mode, sq_dataset** out);

/* profile_json: {"num_questions", "paragraphs_per_question",
 * "distractor_rate", "vocab_size"}; missing fields use stock defaults. */
sq_status sq_dataset_synth(const char* profile_json, uint64_t seed, const char* split,
                           sq_dataset** out);

long long sq_dataset_num_questions(const sq_dataset* ds);
long long sq_dataset_num_paragraphs(const sq_dataset* ds);

/* Counts and provenance: {"split","provenance","questions","paragraphs",
 * "positive_paragraphs","negative_paragraphs","unlabeled_paragraphs",
 * "paragraphs_with_spans"} */
sq_status sq_dataset_summary_json(const sq_dataset* ds, char** out_json);

void sq_dataset_close(sq_dataset* ds);

/* -------- models -------- */

typedef struct sq_model sq_model;

sq_status sq_model_open(const char* path, sq_model** out);
sq_status sq_model_save(const sq_model* m, const char* path);

/* "reader" or "pspr"; pointer owned by the model handle. */
const char* sq_model_kind(const sq_model* m);

/* Header without tensor data: version, kind, config, provenance, vocab
 * size, tensor names/shapes, total parameter count. */
sq_status sq_model_inspect_json(const sq_model* m, char** out_json);

void sq_model_close(sq_model* m);

/* -------- training -------- */

/* Called after each epoch with the mean item loss; return 0 to stop. */
typedef int (*sq_epoch_fn)(int epoch, double mean_loss, void* user);

/* config_json fields: kind ("reader"|"pspr"), epochs, batch_size,
 * learning_rate, seed, hidden, emb_dim, layers, eval_every, min_count,
 * span_window, pspr_sequential. Every field is optional. */
sq_status sq_pretrain(const sq_dataset* ds, const char* config_json, sq_epoch_fn cb, void* user,
                      sq_model** out);

/* Continues from saved weights (never re-initializes them); epochs may be
 * zero, which only extends the vocabulary. */
sq_status sq_finetune(const sq_model* base, const sq_dataset* ds, const char* config_json,
                      sq_epoch_fn cb, void* user, sq_model** out);

/* -------- prediction & evaluation -------- */

/* strategy: "reader_only" | "reader_times_selector" | "combined".
 * selector_or_null supplies the paragraph selector for the latter two; a
 * pspr `reader` handle can serve as its own selector. Writes the
 * prediction JSON to out_path; summary reports question counts. */
sq_status sq_predict(const sq_model* reader, const sq_model* selector_or_null,
                     const sq_dataset* ds, const char* strategy, int k, const char* out_path,
                     char** summary_json);

/* Scores a prediction file against the gold answers of `gold`. Writes the
 * metrics report JSON to out_path (optional, may be NULL); summary carries
 * n, strict_acc, lenient_acc, mrr. */
sq_status sq_evaluate(const char* predictions_path, const sq_dataset* gold, const char* out_path,
                      char** summary_json);

/* -------- utilities -------- */

/* SHA-256 of a file as lowercase hex. */
sq_status sq_file_digest(const char* path, char** out_hex);

#ifdef __cplusplus
}
#endif

#endif /* SPANQA_SPANQA_H_ */
