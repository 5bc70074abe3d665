/** Single-page UI: faculty picker, profile editor, live recommendation
 * feed with like buttons, liked list, attendance log, and the
 * consolidated report view.
 *
 * The UI never computes a score; every number rendered comes straight
 * from an API response, and every mutation is followed by a feed
 * refetch so the view is never stale relative to its own writes.
 */

import { ApiClient, ApiError } from "./api.js";
import { UiSession } from "./session.js";
import type {
  AttendanceRow,
  FacultyProfile,
  ProfileInput,
  Recommendation,
  ReportFilters,
  StpItem,
} from "./types.js";

const PROFILE_FIELDS = ["name", "college", "programs", "interests", "expertise"] as const;
type ProfileField = (typeof PROFILE_FIELDS)[number];

function splitTokens(raw: string): string[] {
  return raw
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export class App {
  readonly session = new UiSession();
  facultyList: FacultyProfile[] = [];
  catalog: StpItem[] = [];
  reportRows: AttendanceRow[] = [];
  reportFilters: ReportFilters = {};
  editorOpen = false;
  creating = false;
  feedLimit: number | undefined;
  errorMessage = "";
  fieldErrors: Partial<Record<ProfileField, string>> = {};
  private editorDraft: Record<ProfileField, string> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: ApiClient,
  ) {}

  async init(): Promise<void> {
    [this.facultyList, this.catalog] = await Promise.all([
      this.client.listFaculty(),
      this.client.listStp(),
    ]);
    this.render();
  }

  // --- actions ---------------------------------------------------------------

  async selectFaculty(facultyId: string): Promise<void> {
    if (!facultyId) {
      this.session.clear();
      this.editorOpen = false;
      this.creating = false;
      this.render();
      return;
    }
    const profile = await this.client.getFaculty(facultyId);
    this.session.select(profile);
    this.editorOpen = false;
    this.creating = false;
    this.errorMessage = "";
    this.fieldErrors = {};
    await this.refreshFeed();
  }

  startCreate(): void {
    this.session.clear();
    this.creating = true;
    this.editorOpen = true;
    this.fieldErrors = {};
    this.editorDraft = { name: "", college: "", programs: "", interests: "", expertise: "" };
    this.render();
  }

  startEdit(): void {
    if (!this.session.profile) return;
    this.editorOpen = true;
    this.creating = false;
    this.fieldErrors = {};
    this.editorDraft = this.draftFromProfile(this.session.profile);
    this.render();
  }

  cancelEdit(): void {
    // Restore the last server-confirmed profile; a brand-new form just closes.
    this.editorOpen = false;
    this.creating = false;
    this.fieldErrors = {};
    this.editorDraft = this.session.profile
      ? this.draftFromProfile(this.session.profile)
      : null;
    this.render();
  }

  private draftFromProfile(profile: FacultyProfile): Record<ProfileField, string> {
    return {
      name: profile.name,
      college: profile.college,
      programs: profile.programs.join(", "),
      interests: profile.interests.join(", "),
      expertise: profile.expertise.join(", "),
    };
  }

  async saveProfile(): Promise<void> {
    const draft = this.collectDraft();
    const input: ProfileInput = {
      name: draft.name,
      college: draft.college,
      programs: splitTokens(draft.programs),
      interests: splitTokens(draft.interests),
      expertise: splitTokens(draft.expertise),
    };
    try {
      const saved = await this.session.enqueueMutation(() =>
        this.creating
          ? this.client.createFaculty(input)
          : this.client.updateFaculty(this.session.selectedFacultyId!, input),
      );
      const profile = await this.client.getFaculty(saved.faculty_id);
      if (this.creating) {
        this.facultyList = await this.client.listFaculty();
      } else {
        this.facultyList = this.facultyList.map((f) =>
          f.faculty_id === profile.faculty_id ? profile : f,
        );
      }
      this.session.select(profile);
      // Server-normalized values come back into the form.
      this.editorDraft = this.draftFromProfile(profile);
      this.creating = false;
      this.editorOpen = true;
      this.errorMessage = "";
      this.fieldErrors = {};
      await this.refreshFeed();
    } catch (error) {
      this.presentError(error);
      this.render();
    }
  }

  async refreshFeed(): Promise<void> {
    if (!this.session.selectedFacultyId) {
      this.render();
      return;
    }
    const feed = await this.client.getRecommendations(this.session.selectedFacultyId, {
      limit: this.feedLimit,
    });
    this.session.setFeed(feed);
    this.render();
  }

  async setFeedLimit(limit: number | undefined): Promise<void> {
    this.feedLimit = limit;
    await this.refreshFeed();
  }

  /** Optimistic like from a feed card; repeat clicks are no-ops and a
   * server-side 409 reconciles silently to the liked state. */
  async like(stpId: string): Promise<void> {
    const facultyId = this.session.selectedFacultyId;
    if (!facultyId || this.session.likedIds.has(stpId)) return;
    this.session.likedIds.add(stpId);
    this.render();
    try {
      await this.session.enqueueMutation(() => this.client.like(facultyId, stpId));
    } catch (error) {
      if (!(error instanceof ApiError && error.code === "duplicate")) {
        this.session.likedIds.delete(stpId);
        this.presentError(error);
        this.render();
        return;
      }
      // Already liked server-side: the optimistic state was right.
    }
    await this.syncAfterLikeChange(facultyId);
  }

  /** Optimistic unlike from the liked list; an absent like (404) means the
   * removal already holds. */
  async unlike(stpId: string): Promise<void> {
    const facultyId = this.session.selectedFacultyId;
    if (!facultyId || !this.session.likedIds.has(stpId)) return;
    this.session.likedIds.delete(stpId);
    this.render();
    try {
      await this.session.enqueueMutation(() => this.client.unlike(facultyId, stpId));
    } catch (error) {
      if (!(error instanceof ApiError && error.status === 404)) {
        this.session.likedIds.add(stpId);
        this.presentError(error);
        this.render();
        return;
      }
    }
    await this.syncAfterLikeChange(facultyId);
  }

  private async syncAfterLikeChange(facultyId: string): Promise<void> {
    const profile = await this.client.getFaculty(facultyId);
    this.session.applyProfile(profile);
    this.errorMessage = "";
    await this.refreshFeed();
  }

  async logAttendance(stpId: string, dateAttended: string, remarks: string): Promise<void> {
    const facultyId = this.session.selectedFacultyId;
    if (!facultyId) return;
    try {
      await this.session.enqueueMutation(() =>
        this.client.addAttendance(facultyId, stpId, dateAttended, remarks || undefined),
      );
      this.errorMessage = "";
      await this.refreshReport();
      await this.refreshFeed();
    } catch (error) {
      this.presentError(error);
      this.render();
    }
  }

  async refreshReport(): Promise<void> {
    try {
      this.reportRows = await this.client.attendanceReport(this.reportFilters);
      this.render();
    } catch (error) {
      this.presentError(error);
      this.render();
    }
  }

  // --- error mapping -----------------------------------------------------------

  private presentError(error: unknown): void {
    if (error instanceof ApiError) {
      this.errorMessage = error.message;
      this.fieldErrors = {};
      for (const field of PROFILE_FIELDS) {
        const hit = error.details.find((d) => d.toLowerCase().includes(field));
        if (hit) this.fieldErrors[field] = hit;
      }
      if (!error.details.length) {
        for (const field of PROFILE_FIELDS) {
          if (error.message.toLowerCase().includes(field)) {
            this.fieldErrors[field] = error.message;
          }
        }
      }
    } else {
      this.errorMessage = String(error);
    }
  }

  // --- rendering ------------------------------------------------------------------

  private collectDraft(): Record<ProfileField, string> {
    const draft = {} as Record<ProfileField, string>;
    for (const field of PROFILE_FIELDS) {
      const input = this.root.querySelector<HTMLInputElement>(`[data-field="${field}"]`);
      draft[field] = input ? input.value : "";
    }
    this.editorDraft = draft;
    return draft;
  }

  render(): void {
    this.root.replaceChildren(
      this.renderHeader(),
      this.renderBanner(),
      this.renderPicker(),
      el(
        "main",
        { class: "columns" },
        this.renderEditor(),
        this.renderFeed(),
        el(
          "section",
          { class: "column activity" },
          this.renderLiked(),
          this.renderAttendanceForm(),
          this.renderReport(),
        ),
      ),
    );
  }

  private renderHeader(): HTMLElement {
    const busy = el("span", {
      "data-testid": "busy",
      class: this.session.busy ? "busy" : "busy hidden",
    });
    busy.textContent = "Saving…";
    return el("header", {}, el("h1", {}, "Seminar & Training Programs"), busy);
  }

  private renderBanner(): HTMLElement {
    const banner = el("div", {
      "data-testid": "error-banner",
      class: this.errorMessage ? "banner" : "banner hidden",
      role: "alert",
    });
    banner.textContent = this.errorMessage;
    return banner;
  }

  private renderPicker(): HTMLElement {
    const select = el("select", { "data-testid": "faculty-picker" }) as HTMLSelectElement;
    select.append(el("option", { value: "" }, "— select faculty —"));
    for (const profile of this.facultyList) {
      const option = el("option", { value: profile.faculty_id }, profile.name);
      select.append(option);
    }
    select.value = this.session.selectedFacultyId ?? "";
    select.addEventListener("change", () => {
      void this.selectFaculty(select.value);
    });

    const createButton = el("button", { "data-testid": "create-new", type: "button" }, "New profile");
    createButton.addEventListener("click", () => this.startCreate());

    const editButton = el("button", { "data-testid": "edit-profile", type: "button" }, "Edit profile");
    editButton.addEventListener("click", () => this.startEdit());
    if (!this.session.profile) (editButton as HTMLButtonElement).disabled = true;

    return el("section", { class: "picker" }, select, createButton, editButton);
  }

  private renderEditor(): HTMLElement {
    const section = el("section", { class: "column editor", "data-testid": "profile-editor" });
    if (!this.editorOpen) {
      if (this.session.profile) {
        section.append(this.renderProfileSummary(this.session.profile));
      } else {
        section.append(el("p", { class: "hint" }, "Select a faculty member or create a new profile."));
      }
      return section;
    }

    const draft = this.editorDraft ?? {
      name: "",
      college: "",
      programs: "",
      interests: "",
      expertise: "",
    };
    section.append(el("h2", {}, this.creating ? "Create profile" : "Edit profile"));
    const labels: Record<ProfileField, string> = {
      name: "Name",
      college: "College",
      programs: "Programs (comma-separated)",
      interests: "Interests (comma-separated)",
      expertise: "Expertise (comma-separated)",
    };
    for (const field of PROFILE_FIELDS) {
      const input = el("input", {
        "data-field": field,
        value: draft[field],
        placeholder: labels[field],
      }) as HTMLInputElement;
      input.value = draft[field];
      const row = el("label", { class: "field" }, labels[field], input);
      const problem = this.fieldErrors[field];
      if (problem) {
        row.append(el("span", { class: "field-error", "data-testid": `error-${field}` }, problem));
      }
      section.append(row);
    }

    const save = el("button", { "data-testid": "save-profile", type: "button" }, "Save");
    save.addEventListener("click", () => {
      void this.saveProfile();
    });
    const cancel = el("button", { "data-testid": "cancel-edit", type: "button" }, "Cancel");
    cancel.addEventListener("click", () => this.cancelEdit());
    section.append(el("div", { class: "actions" }, save, cancel));
    return section;
  }

  private renderProfileSummary(profile: FacultyProfile): HTMLElement {
    return el(
      "div",
      { "data-testid": "profile-summary" },
      el("h2", {}, profile.name),
      el("p", {}, `College: ${profile.college}`),
      el("p", {}, `Programs: ${profile.programs.join(", ") || "—"}`),
      el("p", {}, `Interests: ${profile.interests.join(", ") || "—"}`),
      el("p", {}, `Expertise: ${profile.expertise.join(", ") || "—"}`),
    );
  }

  private renderFeed(): HTMLElement {
    const section = el("section", { class: "column feed", "data-testid": "feed" });
    section.append(el("h2", {}, "Recommended for you"));

    if (!this.session.selectedFacultyId) {
      section.append(el("p", { class: "hint" }, "Pick a faculty member to see recommendations."));
      return section;
    }

    const limit = el("select", { "data-testid": "limit-select" }) as HTMLSelectElement;
    for (const option of ["default", "3", "5", "10"]) {
      limit.append(el("option", { value: option }, option === "default" ? "Default" : `Top ${option}`));
    }
    limit.value = this.feedLimit === undefined ? "default" : String(this.feedLimit);
    limit.addEventListener("change", () => {
      void this.setFeedLimit(limit.value === "default" ? undefined : Number(limit.value));
    });
    section.append(el("div", { class: "feed-controls" }, "Show: ", limit));

    if (this.session.feed.length === 0) {
      section.append(
        el(
          "p",
          { "data-testid": "feed-empty", class: "empty-state" },
          "No matching programs right now. Broaden your interests or check back after new programs are posted.",
        ),
      );
      return section;
    }

    for (const entry of this.session.feed) {
      section.append(this.renderCard(entry));
    }
    return section;
  }

  private neighborName(facultyId: string): string {
    const match = this.facultyList.find((f) => f.faculty_id === facultyId);
    return match ? match.name : facultyId;
  }

  private renderCard(entry: Recommendation): HTMLElement {
    const item = entry.item;
    const card = el("article", { class: "card", "data-testid": "feed-card", "data-stp": entry.stp_id });
    card.append(
      el("h3", {}, item.title),
      el(
        "p",
        { class: "meta" },
        `${item.provider} · ${item.start_date}${item.end_date ? ` → ${item.end_date}` : ""}`,
      ),
      el(
        "p",
        { class: "score", "data-testid": "score" },
        `score ${entry.score.toFixed(3)} (content ${entry.content_component.toFixed(3)}, ` +
          `similar-faculty ${entry.collab_component.toFixed(3)})`,
      ),
    );
    if (entry.matched_terms.length > 0) {
      card.append(
        el("p", { class: "terms", "data-testid": "matched-terms" }, `Matches you on: ${entry.matched_terms.join(", ")}`),
      );
    }
    if (entry.contributing_neighbors.length > 0) {
      const names = entry.contributing_neighbors.map((n) => this.neighborName(n.faculty_id));
      card.append(
        el(
          "p",
          { class: "neighbors", "data-testid": "neighbors" },
          `Faculty similar to you liked this: ${names.join(", ")}`,
        ),
      );
    }
    const like = el("button", { "data-testid": "like-button", type: "button" }, "Like");
    like.addEventListener("click", () => {
      void this.like(entry.stp_id);
    });
    card.append(like);
    return card;
  }

  private renderLiked(): HTMLElement {
    const section = el("div", { "data-testid": "liked-list" }, el("h2", {}, "My liked STPs"));
    if (!this.session.profile) return section;
    const byId = new Map(this.catalog.map((item) => [item.stp_id, item]));
    const liked = [...this.session.likedIds].sort();
    if (liked.length === 0) {
      section.append(el("p", { class: "hint" }, "Nothing liked yet."));
      return section;
    }
    for (const stpId of liked) {
      const item = byId.get(stpId);
      const row = el("div", { class: "liked-row", "data-stp": stpId }, item ? item.title : stpId, " ");
      const unlike = el("button", { "data-testid": "unlike-button", type: "button" }, "Unlike");
      unlike.addEventListener("click", () => {
        void this.unlike(stpId);
      });
      row.append(unlike);
      section.append(row);
    }
    return section;
  }

  private renderAttendanceForm(): HTMLElement {
    const section = el("div", { "data-testid": "attendance-form" }, el("h2", {}, "Log attendance"));
    if (!this.session.profile) return section;

    const picker = el("select", { "data-testid": "attendance-item" }) as HTMLSelectElement;
    for (const item of this.catalog) {
      picker.append(el("option", { value: item.stp_id }, item.title));
    }
    const dateInput = el("input", {
      "data-testid": "attendance-date",
      placeholder: "YYYY-MM-DD",
    }) as HTMLInputElement;
    const remarksInput = el("input", {
      "data-testid": "attendance-remarks",
      placeholder: "Remarks (optional)",
    }) as HTMLInputElement;
    const submit = el("button", { "data-testid": "attendance-submit", type: "button" }, "Log attendance");
    submit.addEventListener("click", () => {
      void this.logAttendance(picker.value, dateInput.value, remarksInput.value);
    });
    section.append(picker, dateInput, remarksInput, submit);
    return section;
  }

  private renderReport(): HTMLElement {
    const section = el("div", { "data-testid": "report-view" }, el("h2", {}, "Attendance report"));

    const college = el("input", {
      "data-testid": "report-college",
      placeholder: "College filter",
      value: this.reportFilters.college ?? "",
    }) as HTMLInputElement;
    const from = el("input", {
      "data-testid": "report-from",
      placeholder: "From (YYYY-MM-DD)",
      value: this.reportFilters.from ?? "",
    }) as HTMLInputElement;
    const to = el("input", {
      "data-testid": "report-to",
      placeholder: "To (YYYY-MM-DD)",
      value: this.reportFilters.to ?? "",
    }) as HTMLInputElement;
    const run = el("button", { "data-testid": "report-run", type: "button" }, "Run report");
    run.addEventListener("click", () => {
      this.reportFilters = {
        college: college.value || undefined,
        from: from.value || undefined,
        to: to.value || undefined,
      };
      void this.refreshReport();
    });
    section.append(el("div", { class: "report-filters" }, college, from, to, run));

    const csv = el(
      "a",
      { "data-testid": "csv-link", href: this.client.reportCsvUrl(this.reportFilters), download: "attendance.csv" },
      "Download CSV",
    );
    section.append(csv);

    const table = el("table", { "data-testid": "report-table" });
    const head = el("tr", {});
    for (const header of ["Faculty", "College", "Title", "Provider", "Date"]) {
      head.append(el("th", {}, header));
    }
    table.append(head);
    for (const row of this.reportRows) {
      const tr = el("tr", { "data-testid": "report-row" });
      for (const cell of [row.faculty_name, row.college, row.title, row.provider, row.date_attended]) {
        tr.append(el("td", {}, cell));
      }
      table.append(tr);
    }
    section.append(table);
    return section;
  }
}
