"""Deterministic metrics: FRE/FKGL readability and agreement statistics."""

from hazeval import agreement as ag
from hazeval import readability as rd

plain = "The dam held. The road stayed dry. Crews went home."
dense = ("Organizational rehabilitation methodologies necessitate comprehensive "
         "infrastructural prioritization under multidimensional uncertainty.")

for label, text in (("plain", plain), ("dense", dense)):
    report = rd.readability(text)
    print(f"{label}: FRE={report.fre:.1f} ({report.fre_band}) "
          f"FKGL={report.fkgl:.1f} ({report.fkgl_band}) "
          f"ASL={report.asl:.1f} ASW={report.asw:.2f}")

# Percent agreement and Fleiss' kappa over paired labels.
rater_a = ["yes"] * 46 + ["yes", "yes", "yes", "yes"]
rater_b = ["yes"] * 46 + ["no", "no", "no", "no"]
print("\npercent agreement:", ag.percent_agreement(rater_a, rater_b))

matrix = []
for x, y in zip(rater_a, rater_b):
    row = [0, 0, 0]  # categories: yes, no, na
    for lab in (x, y):
        row[("yes", "no", "na").index(lab)] += 1
    matrix.append(row)
print("Fleiss kappa:", round(ag.fleiss_kappa(matrix), 4))

# Spearman correlation with the t-distribution p-value.
human = [7, 4, 9, 5, 8, 3, 6]
automated = [0.71, 0.42, 0.88, 0.58, 0.74, 0.31, 0.66]
rho, p = ag.spearman(human, automated)
print(f"Spearman rho={rho:.3f} p={p:.4f}")
