#pragma once

// Worked examples copied from the published examples of the labeling scheme.

#include <string>
#include <tuple>
#include <vector>

namespace fixtures {

struct Row {
  std::string original;  // empty: added sentence
  std::string error;     // empty: omitted sentence
  int label;
  int cls;
};

// Sentence-level examples (nine rows, last one an added device).
inline const std::vector<Row> kSentenceTable = {
    {"Findings: Comparison is made to previous study from ___.",
     "Findings: Comparison is made to previous study from ___.", 2, 13},
    {"There is a right-sided PICC line with distal lead tip at the cavoatrial junction.",
     "There is a right-sided PICC line with distal lead tip at the mid SVC.", 1, 3},
    {"There has been removal of the right-sided chest tube.",
     "There has been removal of the right-sided chest tube.", 0, 13},
    {"There remains a curvilinear tubular device projecting over the mediastinum.",
     "There remains a curvilinear tubular device projecting over the mediastinum.", 0, 13},
    {"This has been seen on multiple images.", "This has been seen on muitiple images.", 1, 12},
    {"There is persistent opacity at the left mid lung field and left-sided pleural effusion which is stable.",
     "There is persistent opacity at the left mid lung field and left-sided pleural effusion which stable.", 1, 12},
    {"There is no pulmonary edema.", "There is no pulmonary edema.", 0, 13},
    {"The right lung is relatively clear.", "The right lung is relatively clear.", 0, 13},
    {"", "The patient has had placement of an endotracheal tube.", 1, 1},
};

inline const std::string kSpliceOriginal1 =
    "Impression: As compared to ___, the lung volumes have slightly decreased.  Signs of mild overinflation and "
    "moderate pleural effusions persist.  Moderate cardiomegaly.  Elongation of the descending aorta.  No pneumonia.";
inline const std::string kSpliceError1 =
    "Impression: As compared to ___, the lung volumes have significantly increased. Signs of severe overinflation and "
    "minor pleural effusions persist. Mild cardiomegaly. Elongation of the ascending aorta. No pneumonia.";
inline const std::string kSpliceOutput1 =
    "{'Impression: As compared to ___, the lung volumes have slightly decreased.' : 'Impression: As compared to ___, "
    "the lung volumes have significantly increased.', 'Signs of mild overinflation and moderate pleural effusions "
    "persist.' : 'Signs of severe overinflation and minor pleural effusions persist.', 'Moderate cardiomegaly.' : "
    "'Mild cardiomegaly.', 'Elongation of the descending aorta.' : 'Elongation of the ascending aorta.', 'No "
    "pneumonia.' : 'No pneumonia.'}";

inline const std::string kSpliceOriginal2 =
    "Findings: NG tube is coiled in the stomach.  Right PICC in lower SVC is unchanged in position.  Cardiac size is "
    "normal.  Mild bibasilar opacities consistent with atelectasis, unchanged compared to chest radiograph performed "
    "earlier in the same day.  There is no pneumothorax or pleural effusion. Impression: NG tube in expected position "
    "with tip coiled in the stomach.  No other interval change since chest radiograph performed earlier on the same "
    "day.";
inline const std::string kSpliceError2 =
    "Findings: NG tube is coiled in the upper part of the duodenum. Right PICC in proximal SVC is unchanged in "
    "position. Mild bibasilar opacities consistent with atelectasis, unchanged compared to chest radiograph performed "
    "earlier in the same day. There is no pneumothorax or pleural effusion. Impression: NG tube in unexpected position "
    "with tip coiled in duodenum. Large bilateral pleural effusions are noted.";
// The printed output carries one key with a trailing space.
inline const std::string kSpliceOutput2 =
    "{'Findings: NG tube is coiled in the stomach.' : 'Findings: NG tube is coiled in the upper part of the "
    "duodenum.', 'Right PICC in lower SVC is unchanged in position.' : 'Right PICC in proximal SVC is unchanged in "
    "position.', 'Cardiac size is normal.' : '', 'Mild bibasilar opacities consistent with atelectasis, unchanged "
    "compared to chest radiograph performed earlier in the same day. ' : 'Mild bibasilar opacities consistent with "
    "atelectasis, unchanged compared to chest radiograph performed earlier in the same day.', 'There is no "
    "pneumothorax or pleural effusion.' : 'There is no pneumothorax or pleural effusion.', 'Impression: NG tube in "
    "expected position with tip coiled in the stomach.' : 'Impression: NG tube in unexpected position with tip coiled "
    "in duodenum.', '' : 'Large bilateral pleural effusions are noted.', 'No other interval change since chest "
    "radiograph performed earlier on the same day.' : ''  }";

// Labeling example: input dictionary and printed output.
inline const std::string kLabelInput =
    "{'Findings: The lung volumes are low.' : 'Findings: The lung volumse are low.', 'The cardiac, mediastinal and "
    "hilar contours appear unchanged, allowing for differences in technique.' : 'The cardiac, mediastinal and hilar "
    "contours appear unchanged, allowing for differences in technique.', 'There are a number of round nodular "
    "densities projecting over each upper lung, but more numerous and discretely visualized in the left upper lobe, "
    "similar to prior study.' : 'There are a number of round nodular densities projecting over each lower lung, but "
    "more numerous and discretely visualized in the right lower lobe, similar to prior study.', 'However, in "
    "addition, there is a more hazy widespread opacity projecting over the left mid upper lung which could be "
    "compatible with a coinciding pneumonia.' : 'However, in addition, there is a more hazy widespread opacity "
    "projecting over the left mid upper lung which could be compatible with a coinciding pneumonia.', 'Pulmonary "
    "nodules in the left upper lobe are also not completely characterized on this study.' : 'Pulmonary nodules in the "
    "right lower lobe are also not completely characterized on this study.', 'There is no pleural effusion or "
    "pneumothorax.' : 'There is no pleural effusion or pneumothorax.', 'Post-operative changes are similar along the "
    "right chest wall.' : 'Post-operative changes are similar along the left chest wall.', 'Impression: Increasing "
    "left lung opacification which may reflect pneumonia superimposed on metastatic disease, although other "
    "etiologies such as lymphangitic pattern of metastatic spread could be considered.' : 'Impression: Increasing "
    "right lung opacification which may reflect pneumonia superimposed on metastatic disease, although other "
    "etiologies such as lymphangitic pattern of metastatic spread could be considered.', 'CT may be helpful to "
    "evaluate further if needed clinically.' : 'CT may be helpful to evaluate further if needed clinically.'}";

// Printed (label, class) per row of the labeling example.
inline const std::vector<std::pair<int, int>> kLabelPrinted = {{1, 12}, {0, 13}, {1, 5}, {0, 13}, {1, 5},
                                                                 {0, 13}, {0, 5},  {0, 5}, {0, 13}};

// Rows where the printed label contradicts the stated labeling rules: the
// "appear unchanged" row carries a comparison cue (neutral), and rows 6 and 7
// change laterality yet print label 0. The deterministic path follows the
// rules there.
inline const std::vector<std::pair<int, int>> kLabelRuleConsistent = {{1, 12}, {2, 13}, {1, 5}, {0, 13}, {1, 5},
                                                                        {0, 13}, {1, 5},  {1, 5}, {0, 13}};

// The neutral-but-changed note.
inline const std::string kNeutralChangedOriginal =
    "Impression: As compared to ___, the lung volumes have slightly decreased.";
inline const std::string kNeutralChangedError =
    "Impression: As compared to ___, the lung volumes have significantly increased.";

inline const std::vector<std::string> kNeutralExamples = {
    "Unexplained severe rightward deviation of the trachea without tracheal narrowing at the level of the thoracic "
    "inlet, not markedly changed since ___",
    "Stable COPD",
    "There is a high level of focal consolidation which has been stable since ___",
    "Compared to chest radiographs since ___",
    "Received note from Dr.___ on ___",
    "Dr. ___ communicated the above results to Dr. ___ at 8:55 am on ___ by telephone.",
};

// Report-level examples: ground truth and error report.
inline const std::string kReport1Truth =
    "Findings: The patient is status post median sternotomy and CABG. The heart size is top normal. The mediastinal "
    "and hilar contours are unremarkable. Bilateral calcified pleural plaques are seen diffusely which limits "
    "assessment of the underlying pulmonary parenchyma. No focal consolidation, pleural effusion or pneumothorax is "
    "clearly demonstrated. There are no acute osseous abnormalities. Impression: Bilateral calcified pleural plaques "
    "indicative of prior asbestos exposure.  No definite acute cardiopulmonary abnormality otherwise noted.";
inline const std::string kReport1Error =
    "Findings: The patient is status post median sternotomy and CABG. The heart size is enlarged. The mediastinal and "
    "hilar contours are unremarkable. Right calcified pleural plaques are seen diffusely which limits assessment of "
    "the underlying pulmonary parenchyma. No focal consolidation, pleural effusion or pneumothorax is clearly "
    "demonstrated. There is a suspected left clavicle fracture. Impression: Right calcified pleural plaques "
    "indicative of prior asbestos exposure. There is a moderate left pleural effusion. No definite acute "
    "cardiopulmonary abnormality otherwise noted.";

inline const std::string kReport2Truth =
    "Findings: Single frontal view of the chest provided.  There is no focal consolidation, effusion, or "
    "pneumothorax. The cardiomediastinal silhouette is normal.  Again seen are multiple clips projecting over the "
    "left breast and remote left-sided rib fractures.  No free air below the right hemidiaphragm is seen. "
    "Impression: No acute intrathoracic process.";
inline const std::string kReport2Error =
    "Findings: Single frontal view of the chest provided.  There is know focal consolidation, effusion, or "
    "pneumothorax. The cardiomediastinal silhouette is normal.  Again seen are multiple clips projecting over the "
    "left breast and remote left-sided rib fractures.  There is an ET tube present in the trachea. No free air below "
    "the right hemidiaphragm is seen. No free air below the right hemidiaphragm is seen. Impression: No acute "
    "intrathoracic process.";

inline const std::string kReport3Truth =
    "Findings: There is mild-to-moderate cardiomegaly, not significantly changed compared with prior study. There is "
    "no pneumothorax. A newly placed endotracheal tube ends 4.3 cm above the carina. An NG tube is seen ending in the "
    "stomach with its tip and side ports beyond the margin of imaging. Impression: 1. Severe acute pulmonary edema. "
    "2.  Endotracheal tube ending 4.3 cm above the carina.";
inline const std::string kReport3Error =
    "Findings: There is mild-to-moderate cardiomegaly, not significantly changed compared with prior study. There is "
    "no pneumothorax. A newly placed endotracheal tube ends 4.3 mm above the carina. An NG tube is seen ending in the "
    "stomach with its tip and side ports beyond the margin of imaging. Impression: 1. No pulmonary edema. 2.  "
    "Endotrakheal tube ending 4.3 cm above the carina.";

}  // namespace fixtures
