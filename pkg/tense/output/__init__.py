from tense.output.csv import read_grid_csv, write_design_csv, write_grid_csv, write_json, write_npz, write_samples_csv
from tense.output.report import TemplateManager, build_report, write_report
