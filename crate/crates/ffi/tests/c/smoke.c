#include <stdio.h>
#include <string.h>
#include "threeform.h"

static const char *O0_PLUS =
    "{\"grade\":3,\"backend\":\"rational\",\"terms\":["
    "{\"indices\":[1,4,6],\"coeff\":\"1\"},"
    "{\"indices\":[2,3,6],\"coeff\":\"1\"},"
    "{\"indices\":[2,4,5],\"coeff\":\"1\"}]}";

int main(void) {
    TfForm *phi = NULL;
    char *json = NULL;
    if (tf_form_parse(O0_PLUS, &phi) != TF_STATUS_OK) return 10;
    if (tf_classify_json(phi, NULL, 0.0, &json) != TF_STATUS_OK) return 11;
    if (strstr(json, "\"gl\":\"O0\"") == NULL) return 12;
    tf_string_free(json);
    tf_form_free(phi);

    if (tf_form_parse("{}", &phi) != TF_STATUS_PARSE || tf_last_error() == NULL) return 13;

    TfSettings s = tf_settings_default();
    s.samples = 5;
    TfReport *report = NULL;
    if (tf_verify("prop2_11", &s, &report) != TF_STATUS_OK) return 14;
    int code = tf_report_exit_code(report);
    tf_report_free(report);
    printf("threeform %s exit %d\n", tf_version(), code);
    return code;
}
